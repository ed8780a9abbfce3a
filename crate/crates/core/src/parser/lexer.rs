use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Colon,
    Arrow,
    Times,
    Forall,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    FatArrow,
    Equals,
    Underscore,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`→`".into(),
            Tok::Times => "`×`".into(),
            Tok::Forall => "`∀`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Underscore => "`_`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub col: usize,
}

fn ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let peek = chars.get(i + 1).copied();
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i),
            '-' if peek == Some('-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if peek == Some('>') => {
                out.push((Tok::Arrow, pos));
                advance(2, &mut i);
            }
            '=' if peek == Some('>') => {
                out.push((Tok::FatArrow, pos));
                advance(2, &mut i);
            }
            _ => {
                let single = match c {
                    ':' => Some(Tok::Colon),
                    '→' => Some(Tok::Arrow),
                    '×' | '*' => Some(Tok::Times),
                    '∀' => Some(Tok::Forall),
                    '{' => Some(Tok::LBrace),
                    '}' => Some(Tok::RBrace),
                    '(' => Some(Tok::LParen),
                    ')' => Some(Tok::RParen),
                    '[' => Some(Tok::LBracket),
                    ']' => Some(Tok::RBracket),
                    ',' => Some(Tok::Comma),
                    '=' => Some(Tok::Equals),
                    '↦' | '⇒' => Some(Tok::FatArrow),
                    '_' if !peek.is_some_and(ident_continue) => Some(Tok::Underscore),
                    _ => None,
                };
                if let Some(tok) = single {
                    out.push((tok, pos));
                    advance(1, &mut i);
                } else if ident_start(c) {
                    let start = i;
                    while i < chars.len() && ident_continue(chars[i]) {
                        i += 1;
                    }
                    let word: String = chars[start..i].iter().collect();
                    col += i - start;
                    let tok = if word == "forall" { Tok::Forall } else { Tok::Ident(word) };
                    out.push((tok, pos));
                } else {
                    return Err(ParseError::new(pos, format!("unexpected character `{c}`")));
                }
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}
