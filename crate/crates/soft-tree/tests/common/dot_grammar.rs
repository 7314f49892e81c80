//! A small checker for the DOT graph-description grammar, independent of
//! the writer: tokenizes and parses `digraph ID? { stmt* }` with node,
//! edge and attribute statements, and counts what it finds.

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Quoted(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semicolon,
    Comma,
    Equals,
    Arrow,
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let bytes: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '{' => {
                tokens.push(Token::LBrace);
                i += 1;
            }
            '}' => {
                tokens.push(Token::RBrace);
                i += 1;
            }
            '[' => {
                tokens.push(Token::LBracket);
                i += 1;
            }
            ']' => {
                tokens.push(Token::RBracket);
                i += 1;
            }
            ';' => {
                tokens.push(Token::Semicolon);
                i += 1;
            }
            ',' => {
                tokens.push(Token::Comma);
                i += 1;
            }
            '=' => {
                tokens.push(Token::Equals);
                i += 1;
            }
            '-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == '>' {
                    tokens.push(Token::Arrow);
                    i += 2;
                } else {
                    return Err(format!("stray '-' at char {i}"));
                }
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    if i >= bytes.len() {
                        return Err("unterminated string".into());
                    }
                    match bytes[i] {
                        '"' => {
                            i += 1;
                            break;
                        }
                        '\\' => {
                            if i + 1 >= bytes.len() {
                                return Err("dangling escape".into());
                            }
                            s.push(bytes[i + 1]);
                            i += 2;
                        }
                        other => {
                            s.push(other);
                            i += 1;
                        }
                    }
                }
                tokens.push(Token::Quoted(s));
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' => {
                let mut s = String::new();
                while i < bytes.len()
                    && (bytes[i].is_alphanumeric() || bytes[i] == '_' || bytes[i] == '.')
                {
                    s.push(bytes[i]);
                    i += 1;
                }
                tokens.push(Token::Ident(s));
            }
            other => return Err(format!("unexpected character {other:?} at {i}")),
        }
    }
    Ok(tokens)
}

#[derive(Debug, Default, PartialEq)]
pub struct DotSummary {
    pub node_statements: usize,
    pub edge_statements: usize,
}

/// Parses a digraph document, returning statement counts or a grammar
/// error.
pub fn check(text: &str) -> Result<DotSummary, String> {
    let tokens = tokenize(text)?;
    let mut pos = 0usize;

    let expect_ident = |tokens: &[Token], pos: &mut usize, what: &str| -> Result<String, String> {
        match tokens.get(*pos) {
            Some(Token::Ident(s)) => {
                *pos += 1;
                Ok(s.clone())
            }
            other => Err(format!("expected {what}, found {other:?}")),
        }
    };

    let keyword = expect_ident(&tokens, &mut pos, "graph kind")?;
    if keyword != "digraph" {
        return Err(format!("expected 'digraph', found {keyword:?}"));
    }
    // Optional graph name.
    if matches!(tokens.get(pos), Some(Token::Ident(_)) | Some(Token::Quoted(_))) {
        pos += 1;
    }
    if tokens.get(pos) != Some(&Token::LBrace) {
        return Err("expected '{' after graph header".into());
    }
    pos += 1;

    let mut summary = DotSummary::default();
    loop {
        match tokens.get(pos) {
            Some(Token::RBrace) => {
                pos += 1;
                break;
            }
            Some(Token::Ident(_)) | Some(Token::Quoted(_)) => {
                let name = match &tokens[pos] {
                    Token::Ident(s) => s.clone(),
                    Token::Quoted(s) => s.clone(),
                    _ => unreachable!(),
                };
                pos += 1;
                match tokens.get(pos) {
                    // Edge statement: id -> id [attrs] ;
                    Some(Token::Arrow) => {
                        pos += 1;
                        expect_ident(&tokens, &mut pos, "edge target")?;
                        parse_optional_attrs(&tokens, &mut pos)?;
                        expect_semicolon(&tokens, &mut pos)?;
                        summary.edge_statements += 1;
                    }
                    // Default-attribute statement for the keywords.
                    Some(Token::LBracket)
                        if matches!(name.as_str(), "graph" | "node" | "edge") =>
                    {
                        parse_optional_attrs(&tokens, &mut pos)?;
                        expect_semicolon(&tokens, &mut pos)?;
                    }
                    // Node statement: id [attrs] ;
                    Some(Token::LBracket) => {
                        parse_optional_attrs(&tokens, &mut pos)?;
                        expect_semicolon(&tokens, &mut pos)?;
                        summary.node_statements += 1;
                    }
                    // Graph attribute: id = value ;
                    Some(Token::Equals) => {
                        pos += 1;
                        expect_value(&tokens, &mut pos)?;
                        expect_semicolon(&tokens, &mut pos)?;
                    }
                    // Bare node statement: id ;
                    Some(Token::Semicolon) => {
                        pos += 1;
                        summary.node_statements += 1;
                    }
                    other => return Err(format!("unexpected token after {name:?}: {other:?}")),
                }
            }
            other => return Err(format!("unexpected token in statement list: {other:?}")),
        }
    }
    if pos != tokens.len() {
        return Err("trailing tokens after closing brace".into());
    }
    Ok(summary)
}

fn expect_semicolon(tokens: &[Token], pos: &mut usize) -> Result<(), String> {
    if tokens.get(*pos) == Some(&Token::Semicolon) {
        *pos += 1;
        Ok(())
    } else {
        Err(format!("expected ';', found {:?}", tokens.get(*pos)))
    }
}

fn expect_value(tokens: &[Token], pos: &mut usize) -> Result<(), String> {
    match tokens.get(*pos) {
        Some(Token::Ident(_)) | Some(Token::Quoted(_)) => {
            *pos += 1;
            Ok(())
        }
        other => Err(format!("expected value, found {other:?}")),
    }
}

fn parse_optional_attrs(tokens: &[Token], pos: &mut usize) -> Result<(), String> {
    if tokens.get(*pos) != Some(&Token::LBracket) {
        return Ok(());
    }
    *pos += 1;
    loop {
        match tokens.get(*pos) {
            Some(Token::RBracket) => {
                *pos += 1;
                return Ok(());
            }
            Some(Token::Ident(_)) => {
                *pos += 1;
                if tokens.get(*pos) != Some(&Token::Equals) {
                    return Err("attribute missing '='".into());
                }
                *pos += 1;
                expect_value(tokens, pos)?;
                if tokens.get(*pos) == Some(&Token::Comma) {
                    *pos += 1;
                }
            }
            other => return Err(format!("bad attribute token {other:?}")),
        }
    }
}
