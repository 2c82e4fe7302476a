use super::FrontendError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Str(String),
    /// An address-like literal: starts with a digit and runs over
    /// alphanumerics, `.`, `:` and `/`.
    Address(String),
    Define,
    Colon,
    Semi,
    Comma,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Bar,
    Star,
    Dot,
    Arrow,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
    /// Byte range in the source.
    pub start: usize,
    pub end: usize,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier {s:?}"),
            TokenKind::Str(s) => format!("string {s:?}"),
            TokenKind::Address(s) => format!("address {s:?}"),
            TokenKind::Define => "':='".into(),
            TokenKind::Colon => "':'".into(),
            TokenKind::Semi => "';'".into(),
            TokenKind::Comma => "','".into(),
            TokenKind::LBrace => "'{'".into(),
            TokenKind::RBrace => "'}'".into(),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
            TokenKind::Bar => "'|'".into(),
            TokenKind::Star => "'*'".into(),
            TokenKind::Dot => "'.'".into(),
            TokenKind::Arrow => "'->'".into(),
            TokenKind::EqEq => "'=='".into(),
            TokenKind::NotEq => "'!='".into(),
            TokenKind::AndAnd => "'&&'".into(),
            TokenKind::OrOr => "'||'".into(),
            TokenKind::Bang => "'!'".into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    source: &'a str,
    chars: Vec<(usize, char)>,
    i: usize,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.i + ahead).map(|c| c.1)
    }

    fn bump(&mut self, n: usize) {
        for _ in 0..n {
            if self.chars[self.i].1 == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
            self.i += 1;
        }
    }

    fn byte(&self) -> usize {
        self.chars.get(self.i).map_or(self.source.len(), |c| c.0)
    }

    fn take_while(&mut self, keep: impl Fn(char) -> bool) -> String {
        let mut text = String::new();
        while let Some(ch) = self.peek(0) {
            if !keep(ch) {
                break;
            }
            text.push(ch);
            self.bump(1);
        }
        text
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut cur = Cursor {
        source,
        chars: source.char_indices().collect(),
        i: 0,
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek(0) {
        let next = cur.peek(1);
        if c.is_whitespace() {
            cur.bump(1);
            continue;
        }
        if c == '/' && next == Some('/') {
            cur.take_while(|ch| ch != '\n');
            continue;
        }
        let (line, column, start) = (cur.line, cur.column, cur.byte());
        let two = |a: char, b: char| c == a && next == Some(b);
        let pair = [
            (':', '=', TokenKind::Define),
            ('-', '>', TokenKind::Arrow),
            ('=', '=', TokenKind::EqEq),
            ('!', '=', TokenKind::NotEq),
            ('&', '&', TokenKind::AndAnd),
            ('|', '|', TokenKind::OrOr),
        ]
        .into_iter()
        .find(|(a, b, _)| two(*a, *b));
        let kind = if let Some((_, _, kind)) = pair {
            cur.bump(2);
            kind
        } else if c == '"' {
            cur.bump(1);
            let mut text = String::new();
            loop {
                match cur.peek(0) {
                    None | Some('\n') => {
                        return Err(FrontendError::syntax(line, column, "unterminated string"));
                    }
                    Some('"') => {
                        cur.bump(1);
                        break;
                    }
                    Some('\\') => {
                        match cur.peek(1) {
                            Some(e @ ('"' | '\\')) => text.push(e),
                            Some('n') => text.push('\n'),
                            Some('t') => text.push('\t'),
                            _ => {
                                return Err(FrontendError::syntax(cur.line, cur.column, "invalid escape in string"));
                            }
                        }
                        cur.bump(2);
                    }
                    Some(ch) => {
                        text.push(ch);
                        cur.bump(1);
                    }
                }
            }
            TokenKind::Str(text)
        } else if c.is_ascii_digit() {
            TokenKind::Address(cur.take_while(|ch| ch.is_ascii_alphanumeric() || matches!(ch, '.' | ':' | '/')))
        } else if is_ident_start(c) {
            TokenKind::Ident(cur.take_while(is_ident_char))
        } else {
            let kind = match c {
                ':' => TokenKind::Colon,
                ';' => TokenKind::Semi,
                ',' => TokenKind::Comma,
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '|' => TokenKind::Bar,
                '*' => TokenKind::Star,
                '.' => TokenKind::Dot,
                '!' => TokenKind::Bang,
                _ => {
                    return Err(FrontendError::syntax(line, column, format!("unexpected character {c:?}")));
                }
            };
            cur.bump(1);
            kind
        };
        tokens.push(Token {
            kind,
            line,
            column,
            start,
            end: cur.byte(),
        });
    }
    Ok(tokens)
}
