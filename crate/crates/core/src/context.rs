use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;

/// An ordered list of distinct variable names over a ground field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarContext {
    names: Vec<String>,
    field: Field,
}

/// Contexts are shared between every polynomial that lives in them.
pub type Ctx = Arc<VarContext>;

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VarContext {
    pub fn new<S: AsRef<str>>(names: &[S], field: Field) -> Result<Ctx> {
        if names.is_empty() {
            return Err(Error::InvalidContext("no variables".into()));
        }
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !is_identifier(n) {
                return Err(Error::InvalidContext(format!("`{n}` is not an identifier")));
            }
            if out.iter().any(|m| m == n) {
                return Err(Error::InvalidContext(format!("duplicate variable `{n}`")));
            }
            out.push(n.to_string());
        }
        Ok(Arc::new(VarContext { names: out, field }))
    }

    /// `prefix1 .. prefixN`.
    pub fn numbered(prefix: &str, n: usize, field: Field) -> Result<Ctx> {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        VarContext::new(&names, field)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// A new context with `extra` appended after the existing names.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Ctx> {
        let mut names = self.names.clone();
        names.extend(extra.iter().map(|s| s.as_ref().to_string()));
        VarContext::new(&names, self.field)
    }

    /// A name derived from `base` that does not clash with this context or
    /// with `taken`.
    pub fn fresh_name(&self, base: &str, taken: &[String]) -> String {
        let clash = |s: &str| self.index_of(s).is_some() || taken.iter().any(|t| t == s);
        if !clash(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|s| !clash(s))
            .expect("unbounded search")
    }
}

pub(crate) fn same_ctx(a: &Ctx, b: &Ctx) -> bool {
    Arc::ptr_eq(a, b) || a == b
}
