use std::collections::BTreeMap;

use thiserror::Error;

use super::{Action, ActionScript, Direction, ElementRef, Platform, ScriptStep};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ActionError {
    #[error("syntax error on line {line}: {reason}")]
    SyntaxError { line: usize, reason: String },
    #[error("unknown action {name:?} on {platform} (line {line})")]
    UnknownAction {
        line: usize,
        name: String,
        platform: Platform,
    },
    #[error("bad argument {name:?} on line {line}: {reason}")]
    BadArgument {
        line: usize,
        name: String,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Str(String),
    Int(i64),
    Float(f64),
    Ident(String),
}

impl Value {
    fn describe(&self) -> &'static str {
        match self {
            Value::Str(_) => "string",
            Value::Int(_) => "integer",
            Value::Float(_) => "float",
            Value::Ident(_) => "identifier",
        }
    }
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line,
            _src: src,
        }
    }

    fn err(&self, reason: impl Into<String>) -> ActionError {
        ActionError::SyntaxError {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c == ' ' || c == '\t') {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ActionError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(match self.peek() {
                Some(found) => format!("expected '{c}', found '{found}'"),
                None => format!("expected '{c}', found end of line"),
            }))
        }
    }

    fn ident(&mut self) -> Result<String, ActionError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.chars[start].is_ascii_digit() {
            return Err(self.err("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn string(&mut self, quote: char) -> Result<String, ActionError> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated string literal")),
                Some(c) if c == quote => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('\\') => {
                    self.pos += 1;
                    let esc = self.peek().ok_or_else(|| self.err("dangling escape"))?;
                    self.pos += 1;
                    out.push(match esc {
                        'n' => '\n',
                        't' => '\t',
                        'r' => '\r',
                        '\\' | '"' | '\'' => esc,
                        other => return Err(self.err(format!("unknown escape \\{other}"))),
                    });
                }
                Some(c) => {
                    self.pos += 1;
                    out.push(c);
                }
            }
        }
    }

    fn number(&mut self) -> Result<Value, ActionError> {
        let start = self.pos;
        if matches!(self.peek(), Some('-' | '+')) {
            self.pos += 1;
        }
        let digits = |cur: &mut Self| {
            let s = cur.pos;
            while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                cur.pos += 1;
            }
            cur.pos > s
        };
        if !digits(self) {
            return Err(self.err("malformed number"));
        }
        let mut is_float = false;
        if self.peek() == Some('.') {
            self.pos += 1;
            is_float = true;
            if !digits(self) {
                return Err(self.err("malformed number"));
            }
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            self.pos += 1;
            is_float = true;
            if matches!(self.peek(), Some('-' | '+')) {
                self.pos += 1;
            }
            if !digits(self) {
                return Err(self.err("malformed exponent"));
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if is_float {
            text.parse::<f64>()
                .map(Value::Float)
                .map_err(|_| self.err(format!("malformed number {text:?}")))
        } else {
            text.parse::<i64>()
                .map(Value::Int)
                .map_err(|_| self.err(format!("integer {text:?} out of range")))
        }
    }

    fn value(&mut self) -> Result<Value, ActionError> {
        self.skip_ws();
        match self.peek() {
            Some(q @ ('"' | '\'')) => self.string(q).map(Value::Str),
            Some(c) if c.is_ascii_digit() || c == '-' || c == '+' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.ident().map(Value::Ident),
            Some(c) => Err(self.err(format!("unexpected '{c}'"))),
            None => Err(self.err("expected a value")),
        }
    }

    /// `name=value` or a bare positional value.
    fn arg(&mut self) -> Result<(Option<String>, Value), ActionError> {
        self.skip_ws();
        let save = self.pos;
        if self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            let name = self.ident()?;
            if self.eat('=') {
                return Ok((Some(name), self.value()?));
            }
            self.pos = save;
        }
        Ok((None, self.value()?))
    }

    fn rest_is_comment(&mut self) -> Result<Option<String>, ActionError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(None),
            Some('#') => {
                let text: String = self.chars[self.pos + 1..].iter().collect();
                let text = text.trim();
                Ok((!text.is_empty()).then(|| text.to_string()))
            }
            Some(c) => Err(self.err(format!("unexpected '{c}' after call"))),
        }
    }
}

struct Call {
    line: usize,
    device: String,
    name: String,
    args: Vec<(Option<String>, Value)>,
    comment: Option<String>,
}

fn parse_line(line_no: usize, text: &str) -> Result<Option<Call>, ActionError> {
    let mut cur = Cursor::new(text, line_no);
    cur.skip_ws();
    match cur.peek() {
        None => return Ok(None),
        Some('#') => return Ok(None),
        _ => {}
    }
    let root = cur.ident()?;
    if root != "computer" {
        return Err(cur.err(format!("only computer.* calls are allowed, found {root:?}")));
    }
    cur.expect('.')?;
    let device = cur.ident()?;
    cur.expect('.')?;
    let name = cur.ident()?;
    cur.expect('(')?;
    let mut args = Vec::new();
    if !cur.eat(')') {
        loop {
            args.push(cur.arg()?);
            if cur.eat(',') {
                if cur.eat(')') {
                    break;
                }
                continue;
            }
            cur.expect(')')?;
            break;
        }
    }
    let comment = cur.rest_is_comment()?;
    Ok(Some(Call {
        line: line_no,
        device,
        name,
        args,
        comment,
    }))
}

struct Args {
    line: usize,
    map: BTreeMap<String, Value>,
}

impl Args {
    fn bad(&self, name: &str, reason: impl Into<String>) -> ActionError {
        ActionError::BadArgument {
            line: self.line,
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    fn has(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    fn take(&mut self, name: &str) -> Result<Value, ActionError> {
        self.map
            .remove(name)
            .ok_or_else(|| self.bad(name, "missing required argument"))
    }

    fn int(&mut self, name: &str) -> Result<i64, ActionError> {
        match self.take(name)? {
            Value::Int(v) => Ok(v),
            other => Err(self.bad(name, format!("expected integer, found {}", other.describe()))),
        }
    }

    fn i32(&mut self, name: &str) -> Result<i32, ActionError> {
        let v = self.int(name)?;
        i32::try_from(v).map_err(|_| self.bad(name, "integer out of range"))
    }

    fn id(&mut self, name: &str) -> Result<u32, ActionError> {
        let v = self.int(name)?;
        match u32::try_from(v) {
            Ok(id) if id >= 1 => Ok(id),
            _ => Err(self.bad(name, "element id must be a positive integer")),
        }
    }

    fn float(&mut self, name: &str) -> Result<f64, ActionError> {
        let v = match self.take(name)? {
            Value::Int(v) => v as f64,
            Value::Float(v) => v,
            other => {
                return Err(self.bad(name, format!("expected number, found {}", other.describe())))
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.bad(name, "number must be finite"))
        }
    }

    fn string(&mut self, name: &str) -> Result<String, ActionError> {
        match self.take(name)? {
            Value::Str(s) | Value::Ident(s) => Ok(s),
            other => Err(self.bad(name, format!("expected string, found {}", other.describe()))),
        }
    }

    fn dir(&mut self) -> Result<Direction, ActionError> {
        let s = self.string("dir")?;
        Direction::parse(&s).ok_or_else(|| self.bad("dir", format!("{s:?} is not up/down/left/right")))
    }

    fn swipe_dist(&mut self) -> Result<f64, ActionError> {
        let d = self.float("dist")?;
        if d > 0.0 {
            Ok(d)
        } else {
            Err(self.bad("dist", "swipe distance must be > 0"))
        }
    }

    fn target(&mut self) -> Result<ElementRef, ActionError> {
        if self.has("id") {
            if self.has("x") || self.has("y") {
                tracing::warn!(line = self.line, "both id and coordinates given; using id");
                self.map.remove("x");
                self.map.remove("y");
            }
            return Ok(ElementRef::ById(self.id("id")?));
        }
        if self.has("x") || self.has("y") {
            let x = self.float("x")?;
            let y = self.float("y")?;
            return Ok(ElementRef::ByCoord { x, y });
        }
        Err(self.bad("id", "expected id=<int> or x=<float>, y=<float>"))
    }

    fn finish(self) -> Result<(), ActionError> {
        match self.map.keys().next() {
            None => Ok(()),
            Some(extra) => Err(self.bad(extra, "unexpected argument")),
        }
    }
}

/// Positional parameter names by action and argument count.
fn positional_names(name: &str, count: usize) -> &'static [&'static str] {
    match (name, count) {
        ("move" | "tap" | "long_tap", 1) => &["id"],
        ("move" | "tap" | "long_tap", _) => &["x", "y"],
        ("scroll", _) => &["dist"],
        ("drag", _) => &["x1", "y1", "x2", "y2"],
        ("press", _) => &["key"],
        ("write", _) => &["text"],
        ("swipe", 3) => &["id", "dir", "dist"],
        ("swipe", _) => &["x", "y", "dir", "dist"],
        _ => &[],
    }
}

fn known(platform: Platform, device: &str, name: &str) -> bool {
    match platform {
        Platform::Desktop => matches!(
            (device, name),
            (
                "mouse",
                "move" | "single_click" | "double_click" | "right_click" | "scroll" | "drag"
            ) | ("keyboard", "press" | "write")
        ),
        Platform::Smartphone => matches!(
            (device, name),
            ("touch", "tap" | "long_tap" | "swipe") | ("keyboard", "write")
        ),
    }
}

fn build_action(call: Call, platform: Platform) -> Result<ScriptStep, ActionError> {
    if !known(platform, &call.device, &call.name) {
        return Err(ActionError::UnknownAction {
            line: call.line,
            name: call.name,
            platform,
        });
    }
    let positional = call.args.iter().filter(|(k, _)| k.is_none()).count();
    let names = positional_names(&call.name, positional);
    let mut map = BTreeMap::new();
    let mut pos_index = 0;
    for (key, value) in call.args {
        let key = match key {
            Some(k) => k,
            None => {
                let Some(k) = names.get(pos_index) else {
                    return Err(ActionError::BadArgument {
                        line: call.line,
                        name: format!("#{}", pos_index + 1),
                        reason: "too many positional arguments".into(),
                    });
                };
                pos_index += 1;
                k.to_string()
            }
        };
        if map.insert(key.clone(), value).is_some() {
            return Err(ActionError::BadArgument {
                line: call.line,
                name: key,
                reason: "argument given twice".into(),
            });
        }
    }
    let mut a = Args {
        line: call.line,
        map,
    };
    let action = match call.name.as_str() {
        "move" => Action::Move {
            target: a.target()?,
        },
        "single_click" => Action::SingleClick,
        "double_click" => Action::DoubleClick,
        "right_click" => Action::RightClick,
        "scroll" => {
            let dist = a.i32("dist")?;
            if dist == 0 {
                return Err(a.bad("dist", "scroll distance must be nonzero"));
            }
            Action::Scroll { dist }
        }
        "drag" => Action::Drag {
            x1: a.i32("x1")?,
            y1: a.i32("y1")?,
            x2: a.i32("x2")?,
            y2: a.i32("y2")?,
        },
        "press" => {
            let key = a.string("key")?;
            if key.trim().is_empty() {
                return Err(a.bad("key", "key must not be empty"));
            }
            Action::Press { key }
        }
        "write" => Action::Write {
            text: a.string("text")?,
        },
        "tap" => Action::Tap {
            target: a.target()?,
        },
        "long_tap" => Action::LongTap {
            target: a.target()?,
        },
        "swipe" => {
            if a.has("id") {
                let id = a.id("id")?;
                Action::SwipeElement {
                    id,
                    dir: a.dir()?,
                    dist: a.swipe_dist()?,
                }
            } else {
                Action::SwipeCoord {
                    x: a.i32("x")?,
                    y: a.i32("y")?,
                    dir: a.dir()?,
                    dist: a.swipe_dist()?,
                }
            }
        }
        _ => unreachable!("filtered by known()"),
    };
    a.finish()?;
    Ok(ScriptStep {
        action,
        comment: call.comment,
    })
}

/// Parses a code block of `computer.<device>.<action>(...)` calls, one per
/// line, with optional `# comment` suffixes.
pub fn parse_action_script(code: &str, platform: Platform) -> Result<ActionScript, ActionError> {
    let mut steps = Vec::new();
    for (i, line) in code.lines().enumerate() {
        if let Some(call) = parse_line(i + 1, line)? {
            steps.push(build_action(call, platform)?);
        }
    }
    if steps.is_empty() {
        return Err(ActionError::SyntaxError {
            line: 1,
            reason: "empty script".into(),
        });
    }
    Ok(ActionScript { steps })
}
