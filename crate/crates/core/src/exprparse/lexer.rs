use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, pos: start });
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v = src[start..i]
                .parse::<u64>()
                .map_err(|_| Error::Parse { pos: start, msg: "integer literal too large".into() })?;
            out.push(Token { tok: Tok::Int(v), pos: start });
        } else if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), pos: start });
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(Error::Parse { pos: start, msg: format!("unexpected character '{ch}'") });
        }
    }
    out.push(Token { tok: Tok::End, pos: src.len() });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let t = tokenize("dr - r^-1*w2").unwrap();
        let kinds: Vec<_> = t.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("dr".into()),
                Tok::Minus,
                Tok::Ident("r".into()),
                Tok::Caret,
                Tok::Minus,
                Tok::Int(1),
                Tok::Star,
                Tok::Ident("w2".into()),
                Tok::End
            ]
        );
        assert_eq!(t[2].pos, 5);
        assert!(matches!(tokenize("a $ b"), Err(Error::Parse { pos: 2, .. })));
    }
}
