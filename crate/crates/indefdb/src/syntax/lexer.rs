//! Tokenizer for the instance format. Never panics on arbitrary input;
//! unknown bytes become diagnostics.

use crate::error::Diagnostic;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    Var(String),
    Int(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Semi,
    Slash,
    Pipe,
    Arrow,     // ->
    ColonDash, // :-
    Leq,       // <=
    Eq,        // =
    Plus,
    Minus,
    At,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();

    macro_rules! push {
        ($t:expr, $l:expr, $c:expr) => {
            toks.push(Token { tok: $t, line: $l, col: $c })
        };
    }

    while let Some(&ch) = chars.peek() {
        let (l, c) = (line, col);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '%' => {
                while let Some(&ch) = chars.peek() {
                    if ch == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '{' => {
                chars.next();
                col += 1;
                push!(Tok::LBrace, l, c);
            }
            '}' => {
                chars.next();
                col += 1;
                push!(Tok::RBrace, l, c);
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LParen, l, c);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RParen, l, c);
            }
            ',' => {
                chars.next();
                col += 1;
                push!(Tok::Comma, l, c);
            }
            '.' => {
                chars.next();
                col += 1;
                push!(Tok::Dot, l, c);
            }
            ';' => {
                chars.next();
                col += 1;
                push!(Tok::Semi, l, c);
            }
            '/' => {
                chars.next();
                col += 1;
                push!(Tok::Slash, l, c);
            }
            '|' => {
                chars.next();
                col += 1;
                push!(Tok::Pipe, l, c);
            }
            '@' => {
                chars.next();
                col += 1;
                push!(Tok::At, l, c);
            }
            '+' => {
                chars.next();
                col += 1;
                push!(Tok::Plus, l, c);
            }
            '=' => {
                chars.next();
                col += 1;
                push!(Tok::Eq, l, c);
            }
            '-' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'>') {
                    chars.next();
                    col += 1;
                    push!(Tok::Arrow, l, c);
                } else {
                    push!(Tok::Minus, l, c);
                }
            }
            ':' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'-') {
                    chars.next();
                    col += 1;
                    push!(Tok::ColonDash, l, c);
                } else {
                    push!(Tok::Colon, l, c);
                }
            }
            '<' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Leq, l, c);
                } else {
                    diags.push(Diagnostic::new(l, c, "lexical", "expected `<=`"));
                }
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_digit() {
                        s.push(ch);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                match s.parse::<u64>() {
                    Ok(n) => push!(Tok::Int(n), l, c),
                    Err(_) => {
                        diags.push(Diagnostic::new(l, c, "lexical", format!("numeral `{s}` out of range")))
                    }
                }
            }
            ch if ch.is_ascii_alphabetic() || ch == '_' => {
                let upper = ch.is_ascii_uppercase();
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        s.push(ch);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                if upper {
                    push!(Tok::Var(s), l, c);
                } else {
                    push!(Tok::Ident(s), l, c);
                }
            }
            other => {
                chars.next();
                col += 1;
                diags.push(Diagnostic::new(l, c, "lexical", format!("unexpected character `{other}`")));
            }
        }
    }
    (toks, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_rule_syntax() {
        let (toks, diags) = lex("p(X) :- q(X,Y), not r(Y).\n% comment\n");
        assert!(diags.is_empty());
        assert!(toks.iter().any(|t| t.tok == Tok::ColonDash));
        assert!(toks.iter().any(|t| matches!(&t.tok, Tok::Var(v) if v == "X")));
    }

    #[test]
    fn rejects_garbage() {
        let (_, diags) = lex("p(a). $ #");
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().all(|d| d.code == "lexical"));
    }

    #[test]
    fn tracks_positions() {
        let (toks, _) = lex("a\nbb ccc");
        assert_eq!((toks[0].line, toks[0].col), (1, 1));
        assert_eq!((toks[1].line, toks[1].col), (2, 1));
        assert_eq!((toks[2].line, toks[2].col), (2, 4));
    }
}
