use super::ast::Pos;
use super::FrontendError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// `\name` keyword inside annotations, stored without the backslash.
    Backslash(String),
    Int(i128),
    Char(u8),
    Punct(&'static str),
    /// `/*@` or `//@`.
    AnnotOpen,
    /// `*/`, or the newline ending a `//@` annotation.
    AnnotClose,
    /// `/@` inside an annotation.
    NestedOpen,
    /// `@/`.
    NestedClose,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Backslash(s) => format!("`\\{s}`"),
            Tok::Int(i) => format!("integer `{i}`"),
            Tok::Char(_) => "character literal".into(),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::AnnotOpen => "`/*@`".into(),
            Tok::AnnotClose => "end of annotation".into(),
            Tok::NestedOpen => "`/@`".into(),
            Tok::NestedClose => "`@/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Mode {
    Code,
    Block,
    Line,
    Nested,
}

// Longest first.
const PUNCTS: &[&str] = &[
    "<==>", "==>", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "++", "--", "..", "->", "(",
    ")", "{", "}", "[", "]", ";", ",", ":", "?", "+", "-", "*", "!", "<", ">", "=", "&",
];

pub fn lex(text: &str, file: u32) -> Result<Vec<Token>, FrontendError> {
    Lexer { src: text.as_bytes(), i: 0, line: 1, col: 1, file, modes: vec![Mode::Code], out: vec![] }
        .run()
}

struct Lexer<'a> {
    src: &'a [u8],
    i: usize,
    line: u32,
    col: u32,
    file: u32,
    modes: Vec<Mode>,
    out: Vec<Token>,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos::new(self.file, self.line, self.col)
    }

    fn peek(&self, k: usize) -> u8 {
        self.src.get(self.i + k).copied().unwrap_or(0)
    }

    fn starts(&self, s: &str) -> bool {
        self.src[self.i..].starts_with(s.as_bytes())
    }

    fn bump(&mut self) -> u8 {
        let Some(&c) = self.src.get(self.i) else {
            return 0;
        };
        self.i += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn mode(&self) -> Mode {
        *self.modes.last().unwrap()
    }

    fn push(&mut self, tok: Tok, pos: Pos) {
        self.out.push(Token { tok, pos });
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> FrontendError {
        FrontendError::Syntax { pos, expected: vec![], found: msg.into() }
    }

    fn run(mut self) -> Result<Vec<Token>, FrontendError> {
        let mut at_line_start = true;
        while self.i < self.src.len() {
            let pos = self.pos();
            let c = self.peek(0);
            let mode = self.mode();
            if c == b'\n' {
                self.bump();
                at_line_start = true;
                if mode == Mode::Line {
                    self.modes.pop();
                    self.push(Tok::AnnotClose, pos);
                }
                continue;
            }
            if c.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            if mode == Mode::Code && at_line_start && c == b'#' {
                while self.i < self.src.len() && self.peek(0) != b'\n' {
                    self.bump();
                }
                continue;
            }
            at_line_start = false;
            match mode {
                Mode::Code => {
                    if self.starts("/*@") {
                        self.bump_n(3);
                        self.modes.push(Mode::Block);
                        self.push(Tok::AnnotOpen, pos);
                        continue;
                    }
                    if self.starts("//@") {
                        self.bump_n(3);
                        self.modes.push(Mode::Line);
                        self.push(Tok::AnnotOpen, pos);
                        continue;
                    }
                }
                Mode::Block | Mode::Line | Mode::Nested => {
                    if self.starts("*/") {
                        if mode != Mode::Block {
                            return Err(self.err(pos, "`*/` inside an unterminated nested annotation"));
                        }
                        self.bump_n(2);
                        self.modes.pop();
                        self.push(Tok::AnnotClose, pos);
                        continue;
                    }
                    if self.starts("@/") && mode == Mode::Nested {
                        self.bump_n(2);
                        self.modes.pop();
                        self.push(Tok::NestedClose, pos);
                        continue;
                    }
                    if self.starts("/@") {
                        self.bump_n(2);
                        self.modes.push(Mode::Nested);
                        self.push(Tok::NestedOpen, pos);
                        continue;
                    }
                    if c == b'@' {
                        self.bump();
                        continue;
                    }
                }
            }
            if self.starts("/*") {
                self.bump_n(2);
                while self.i < self.src.len() && !self.starts("*/") {
                    self.bump();
                }
                if self.i >= self.src.len() {
                    return Err(self.err(pos, "unterminated comment"));
                }
                self.bump_n(2);
                continue;
            }
            if self.starts("//") {
                while self.i < self.src.len() && self.peek(0) != b'\n' {
                    self.bump();
                }
                continue;
            }
            if c.is_ascii_alphabetic() || c == b'_' {
                let start = self.i;
                while self.peek(0).is_ascii_alphanumeric() || self.peek(0) == b'_' {
                    self.bump();
                }
                let word = String::from_utf8_lossy(&self.src[start..self.i]).into_owned();
                self.push(Tok::Ident(word), pos);
                continue;
            }
            if c == b'\\' && self.peek(1).is_ascii_alphabetic() {
                self.bump();
                let start = self.i;
                while self.peek(0).is_ascii_alphanumeric() || self.peek(0) == b'_' {
                    self.bump();
                }
                let word = String::from_utf8_lossy(&self.src[start..self.i]).into_owned();
                self.push(Tok::Backslash(word), pos);
                continue;
            }
            if c.is_ascii_digit() {
                let v = self.number(pos)?;
                self.push(Tok::Int(v), pos);
                continue;
            }
            if c == b'\'' {
                let v = self.char_lit(pos)?;
                self.push(Tok::Char(v), pos);
                continue;
            }
            if let Some(p) = PUNCTS.iter().find(|p| self.starts(p)) {
                self.bump_n(p.len());
                self.push(Tok::Punct(p), pos);
                continue;
            }
            return Err(self.err(pos, format!("unexpected character `{}`", c as char)));
        }
        let pos = self.pos();
        match self.mode() {
            Mode::Code => {}
            Mode::Line => {
                self.modes.pop();
                self.push(Tok::AnnotClose, pos);
            }
            _ => return Err(self.err(pos, "unterminated annotation")),
        }
        self.push(Tok::Eof, pos);
        Ok(self.out)
    }

    fn number(&mut self, pos: Pos) -> Result<i128, FrontendError> {
        let (radix, start) = if self.starts("0x") || self.starts("0X") {
            self.bump_n(2);
            (16, self.i)
        } else {
            (10, self.i)
        };
        while self.peek(0).is_ascii_hexdigit() && (radix == 16 || self.peek(0).is_ascii_digit()) {
            self.bump();
        }
        let digits = std::str::from_utf8(&self.src[start..self.i]).unwrap_or("");
        let v = i128::from_str_radix(digits, radix)
            .map_err(|_| self.err(pos, format!("malformed integer literal `{digits}`")))?;
        while matches!(self.peek(0), b'u' | b'U' | b'l' | b'L') {
            self.bump();
        }
        if self.peek(0).is_ascii_alphanumeric() || self.peek(0) == b'_' {
            return Err(self.err(pos, "malformed integer literal"));
        }
        Ok(v)
    }

    fn char_lit(&mut self, pos: Pos) -> Result<u8, FrontendError> {
        self.bump();
        let c = self.peek(0);
        let v = if c == b'\\' {
            self.bump();
            let e = self.bump();
            match e {
                b'n' => b'\n',
                b't' => b'\t',
                b'r' => b'\r',
                b'v' => 0x0b,
                b'f' => 0x0c,
                b'a' => 0x07,
                b'b' => 0x08,
                b'\\' => b'\\',
                b'\'' => b'\'',
                b'"' => b'"',
                b'x' => {
                    let start = self.i;
                    while self.peek(0).is_ascii_hexdigit() && self.i - start < 2 {
                        self.bump();
                    }
                    let s = std::str::from_utf8(&self.src[start..self.i]).unwrap_or("");
                    u8::from_str_radix(s, 16).map_err(|_| self.err(pos, "bad hex escape"))?
                }
                b'0'..=b'7' => {
                    let mut v = (e - b'0') as u32;
                    let mut n = 1;
                    while n < 3 && (b'0'..=b'7').contains(&self.peek(0)) {
                        v = v * 8 + (self.bump() - b'0') as u32;
                        n += 1;
                    }
                    u8::try_from(v).map_err(|_| self.err(pos, "octal escape out of range"))?
                }
                _ => return Err(self.err(pos, "unknown escape sequence")),
            }
        } else if c == b'\'' || c == b'\n' || c == 0 {
            return Err(self.err(pos, "empty character literal"));
        } else {
            self.bump()
        };
        if self.peek(0) != b'\'' {
            return Err(self.err(pos, "unterminated character literal"));
        }
        self.bump();
        Ok(v)
    }
}
