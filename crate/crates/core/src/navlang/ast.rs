use std::fmt;

/// Largest repetition bound accepted in `e{m,n}`.
pub const MAX_REPEAT: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NavExpression {
    /// Traverse one edge with this label.
    Label(String),
    /// Traverse one edge, any label.
    AnyLabel,
    Concat(Box<NavExpression>, Box<NavExpression>),
    Alt(Box<NavExpression>, Box<NavExpression>),
    Star(Box<NavExpression>),
    Plus(Box<NavExpression>),
    Optional(Box<NavExpression>),
    Repeat(Box<NavExpression>, u32, u32),
    /// Passes iff the current node has attribute `key=value`; consumes no edge.
    NodeTest(String, String),
}

impl NavExpression {
    pub fn label(l: impl Into<String>) -> Self {
        NavExpression::Label(l.into())
    }

    pub fn node_test(key: impl Into<String>, value: impl Into<String>) -> Self {
        NavExpression::NodeTest(key.into(), value.into())
    }

    pub fn concat(a: NavExpression, b: NavExpression) -> Self {
        NavExpression::Concat(Box::new(a), Box::new(b))
    }

    pub fn alt(a: NavExpression, b: NavExpression) -> Self {
        NavExpression::Alt(Box::new(a), Box::new(b))
    }

    pub fn star(e: NavExpression) -> Self {
        NavExpression::Star(Box::new(e))
    }

    pub fn plus(e: NavExpression) -> Self {
        NavExpression::Plus(Box::new(e))
    }

    pub fn optional(e: NavExpression) -> Self {
        NavExpression::Optional(Box::new(e))
    }

    pub fn repeat(e: NavExpression, min: u32, max: u32) -> Self {
        NavExpression::Repeat(Box::new(e), min, max)
    }

    pub fn depth(&self) -> usize {
        use NavExpression::*;
        match self {
            Label(_) | AnyLabel | NodeTest(..) => 1,
            Concat(a, b) | Alt(a, b) => 1 + a.depth().max(b.depth()),
            Star(e) | Plus(e) | Optional(e) | Repeat(e, ..) => 1 + e.depth(),
        }
    }

    fn precedence(&self) -> u8 {
        use NavExpression::*;
        match self {
            Alt(..) => 1,
            Concat(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        use NavExpression::*;
        let paren = self.precedence() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Label(l) => write_word(f, l)?,
            AnyLabel => f.write_str("_")?,
            NodeTest(k, v) => {
                f.write_str("[")?;
                write_word(f, k)?;
                f.write_str("=")?;
                write_word(f, v)?;
                f.write_str("]")?;
            }
            // Both operators parse left-associatively, so a right operand of
            // the same kind needs parentheses to keep its shape.
            Alt(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str("|")?;
                b.fmt_at(f, 2)?;
            }
            Concat(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str("/")?;
                b.fmt_at(f, 3)?;
            }
            Star(e) => {
                e.fmt_at(f, 3)?;
                f.write_str("*")?;
            }
            Plus(e) => {
                e.fmt_at(f, 3)?;
                f.write_str("+")?;
            }
            Optional(e) => {
                e.fmt_at(f, 3)?;
                f.write_str("?")?;
            }
            Repeat(e, m, n) => {
                e.fmt_at(f, 3)?;
                if m == n {
                    write!(f, "{{{m}}}")?;
                } else {
                    write!(f, "{{{m},{n}}}")?;
                }
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Canonical surface syntax; parsing the output yields the same tree.
impl fmt::Display for NavExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 1)
    }
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '#' | '@' | '~' | '%')
}

fn is_bare_word(s: &str) -> bool {
    !s.is_empty() && s != "_" && s.chars().all(is_word_char)
}

fn write_word(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    if is_bare_word(s) {
        return f.write_str(s);
    }
    f.write_str("'")?;
    for c in s.chars() {
        if c == '\'' || c == '\\' {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("'")
}
