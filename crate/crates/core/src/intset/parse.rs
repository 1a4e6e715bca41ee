use alloc::{collections::BTreeMap, format, string::String, sync::Arc, vec::Vec};

use super::{BlockSchedule, Enumerator, Schedule, SetExpr};
use crate::{Error, Result};

/// Named block schedules that `blocks(name)` may refer to.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    schedules: BTreeMap<String, Arc<BlockSchedule>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry::default()
    }

    /// `prop1i`, `ex3`, `ex3alt` and `cuberamp`.
    pub fn with_builtins() -> Self {
        let mut r = Registry::default();
        for (name, s) in [
            ("prop1i", Schedule::Prop1i),
            ("ex3", Schedule::Example3),
            ("ex3alt", Schedule::Example3Alt),
            ("cuberamp", Schedule::CubeRamp),
        ] {
            r.insert(BlockSchedule::new(name, s).expect("builtin names are valid"));
        }
        r
    }

    /// Adds or replaces a schedule and returns the shared handle.
    pub fn insert(&mut self, s: BlockSchedule) -> Arc<BlockSchedule> {
        let handle = Arc::new(s);
        self.schedules.insert(handle.name().into(), handle.clone());
        handle
    }

    pub fn get(&self, name: &str) -> Option<Arc<BlockSchedule>> {
        self.schedules.get(name).cloned()
    }

    /// Shorthand for `SetExpr::Blocks` of a registered schedule.
    pub fn expr(&self, name: &str) -> Option<SetExpr> {
        self.get(name).map(SetExpr::Blocks)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.schedules.keys().map(String::as_str)
    }
}

/// Parses one expression of the set grammar.
pub fn parse(src: &str, registry: &Registry) -> Result<SetExpr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, registry };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    registry: &'a Registry,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn found(&self) -> String {
        match self.src.get(self.pos) {
            None => "end of input".into(),
            Some(_) => {
                let end = (self.pos + 12).min(self.src.len());
                format!("{:?}", String::from_utf8_lossy(&self.src[self.pos..end]))
            }
        }
    }

    fn error(&self, expected: &str) -> Error {
        Error::Parse { pos: self.pos, message: format!("expected {expected}, found {}", self.found()) }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("'{}'", c as char)))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || !self.src[start].is_ascii_alphabetic() {
            self.pos = start;
            return Err(self.error("an identifier"));
        }
        Ok(core::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn natural(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("a natural number"));
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| Error::Parse { pos: start, message: format!("number {text} out of range") })
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let start = self.pos;
        let v = self.natural()?;
        let v = i64::try_from(v).map_err(|_| Error::Parse { pos: start, message: "shift out of range".into() })?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<SetExpr> {
        if self.peek() == Some(b'{') {
            return self.finite();
        }
        let start = self.pos;
        let name: String = self.ident()?.into();
        let e = match name.as_str() {
            "squares" => SetExpr::Enum(Enumerator::Squares),
            "factorial" => SetExpr::Enum(Enumerator::Factorial),
            "pow2sq" => SetExpr::Enum(Enumerator::Pow2Sq),
            "philoglog" => {
                self.eat(b'(')?;
                let at = self.pos;
                let s = self.natural()?;
                self.eat(b')')?;
                let e = Enumerator::philoglog(s).map_err(|err| at_pos(err, at))?;
                SetExpr::Enum(e)
            }
            "ap" => {
                self.eat(b'(')?;
                let a = self.natural()?;
                self.eat(b',')?;
                let at = self.pos;
                let d = self.natural()?;
                self.eat(b')')?;
                SetExpr::ap(a, d).map_err(|err| at_pos(err, at))?
            }
            "blocks" => {
                self.eat(b'(')?;
                let at = self.pos;
                let n = self.ident()?;
                let s = self.registry.get(n).ok_or_else(|| Error::Parse {
                    pos: at,
                    message: format!("unknown block schedule {n:?}"),
                })?;
                self.eat(b')')?;
                SetExpr::Blocks(s)
            }
            "union" | "inter" | "diff" => {
                self.eat(b'(')?;
                let a = self.expr()?;
                self.eat(b',')?;
                let b = self.expr()?;
                self.eat(b')')?;
                match name.as_str() {
                    "union" => SetExpr::union(a, b),
                    "inter" => SetExpr::inter(a, b),
                    _ => SetExpr::diff(a, b),
                }
            }
            "compl" => {
                self.eat(b'(')?;
                let a = self.expr()?;
                self.eat(b')')?;
                SetExpr::compl(a)
            }
            "shift" => {
                self.eat(b'(')?;
                let a = self.expr()?;
                self.eat(b',')?;
                let k = self.integer()?;
                self.eat(b')')?;
                SetExpr::shift(a, k)
            }
            _ => {
                self.pos = start;
                return Err(self.error("a set expression"));
            }
        };
        Ok(e)
    }

    fn finite(&mut self) -> Result<SetExpr> {
        self.eat(b'{')?;
        let mut items = Vec::new();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(SetExpr::Finite(items.into()));
        }
        loop {
            let at = self.pos;
            let v = self.natural()?;
            if v == 0 {
                return Err(Error::Parse { pos: at, message: "0 is not a natural number here".into() });
            }
            items.push(v);
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.error("',' or '}'")),
            }
        }
        SetExpr::finite(items)
    }
}

fn at_pos(err: Error, pos: usize) -> Error {
    match err {
        Error::InvalidArgument(message) => Error::Parse { pos, message },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn round_trips() {
        let reg = Registry::with_builtins();
        for src in [
            "{1,2,3}",
            "{}",
            "ap(2,2)",
            "squares",
            "philoglog(15)",
            "blocks(prop1i)",
            "union(ap(1,2),inter(squares,compl(blocks(ex3))))",
            "shift(diff(ap(1,1),{5}),-3)",
        ] {
            let e = parse(src, &reg).unwrap();
            assert_eq!(e.to_string(), src);
            assert_eq!(parse(&e.to_string(), &reg).unwrap(), e);
        }
    }

    #[test]
    fn whitespace_and_unsorted_finite_sets() {
        let reg = Registry::with_builtins();
        let e = parse(" union( {3, 1,2} , ap(4 ,4) ) ", &reg).unwrap();
        assert_eq!(e.to_string(), "union({1,2,3},ap(4,4))");
    }

    #[test]
    fn errors_name_position_and_token() {
        let reg = Registry::with_builtins();
        let err = parse("union(ap(1,2),,)", &reg).unwrap_err();
        assert_eq!(
            err,
            Error::Parse { pos: 14, message: "expected an identifier, found \",)\"".into() }
        );
        assert!(matches!(parse("ap(1,0)", &reg), Err(Error::Parse { pos: 5, .. })));
        assert!(matches!(parse("blocks(nope)", &reg), Err(Error::Parse { pos: 7, .. })));
        assert!(matches!(parse("{0}", &reg), Err(Error::Parse { pos: 1, .. })));
        assert!(matches!(parse("squares x", &reg), Err(Error::Parse { pos: 8, .. })));
        assert!(matches!(parse("philoglog(1)", &reg), Err(Error::Parse { .. })));
    }
}
