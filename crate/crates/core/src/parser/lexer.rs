use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Word(String),
    Integer(i64),
    Text(String),
    Comma,
    Dot,
    LParen,
    RParen,
    Star,
    Plus,
    Minus,
    Slash,
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    Semicolon,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub offset: usize,
}

pub(crate) fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = |kind| Token {
            kind,
            offset: start,
        };
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'-' if bytes.get(i + 1) == Some(&b'-') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b',' => {
                tokens.push(single(TokenKind::Comma));
                i += 1;
            }
            b'.' => {
                tokens.push(single(TokenKind::Dot));
                i += 1;
            }
            b'(' => {
                tokens.push(single(TokenKind::LParen));
                i += 1;
            }
            b')' => {
                tokens.push(single(TokenKind::RParen));
                i += 1;
            }
            b'*' => {
                tokens.push(single(TokenKind::Star));
                i += 1;
            }
            b'+' => {
                tokens.push(single(TokenKind::Plus));
                i += 1;
            }
            b'-' => {
                tokens.push(single(TokenKind::Minus));
                i += 1;
            }
            b'/' => {
                tokens.push(single(TokenKind::Slash));
                i += 1;
            }
            b';' => {
                tokens.push(single(TokenKind::Semicolon));
                i += 1;
            }
            b'=' => {
                tokens.push(single(TokenKind::Eq));
                i += 1;
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                tokens.push(single(TokenKind::NotEq));
                i += 2;
            }
            b'<' => {
                let (kind, len) = match bytes.get(i + 1) {
                    Some(b'=') => (TokenKind::LtEq, 2),
                    Some(b'>') => (TokenKind::NotEq, 2),
                    _ => (TokenKind::Lt, 1),
                };
                tokens.push(single(kind));
                i += len;
            }
            b'>' => {
                let (kind, len) = match bytes.get(i + 1) {
                    Some(b'=') => (TokenKind::GtEq, 2),
                    _ => (TokenKind::Gt, 1),
                };
                tokens.push(single(kind));
                i += len;
            }
            b'\'' => {
                i += 1;
                let mut text = String::new();
                loop {
                    let Some(rel) = input[i..].find('\'') else {
                        return Err(ParseError::new(start, "unterminated string literal"));
                    };
                    text.push_str(&input[i..i + rel]);
                    i += rel + 1;
                    if bytes.get(i) == Some(&b'\'') {
                        text.push('\'');
                        i += 1;
                    } else {
                        break;
                    }
                }
                tokens.push(single(TokenKind::Text(text)));
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if bytes.get(i) == Some(&b'.') && bytes.get(i + 1).is_some_and(u8::is_ascii_digit) {
                    return Err(ParseError::new(start, "decimal constants are not supported"));
                }
                let value = input[start..i]
                    .parse()
                    .map_err(|_| ParseError::new(start, "integer constant out of range"))?;
                tokens.push(single(TokenKind::Integer(value)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(single(TokenKind::Word(input[start..i].to_owned())));
            }
            _ => {
                let ch = input[start..].chars().next().unwrap_or('?');
                return Err(ParseError::new(start, format!("unexpected character '{ch}'")));
            }
        }
    }
    Ok(tokens)
}
