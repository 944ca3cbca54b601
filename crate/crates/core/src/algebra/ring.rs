use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::monomial::MonomialOrder;
use super::scalar::Field;
use crate::error::{Error, Result};

struct RingInner {
    vars: Vec<String>,
    field: Field,
    order: MonomialOrder,
}

/// A polynomial ring descriptor: ordered variable names, coefficient field and
/// the active monomial order. Cheap to clone.
#[derive(Clone)]
pub struct Ring(Arc<RingInner>);

impl Ring {
    pub fn new<S: AsRef<str>>(vars: &[S], field: Field, order: MonomialOrder) -> Result<Ring> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::validation(format!("invalid variable name {v:?}")));
            }
            if vars[..i].contains(v) {
                return Err(Error::validation(format!("duplicate variable {v:?}")));
            }
        }
        if let MonomialOrder::Block { eliminate } = &order {
            if eliminate.len() != vars.len() {
                return Err(Error::validation(
                    "block order length differs from variable count",
                ));
            }
        }
        Ok(Ring(Arc::new(RingInner { vars, field, order })))
    }

    /// Rational grevlex ring, the default for user-facing ideals.
    pub fn rational<S: AsRef<str>>(vars: &[S]) -> Result<Ring> {
        Ring::new(vars, Field::Rational, MonomialOrder::GrevLex)
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.0.order
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn with_order(&self, order: MonomialOrder) -> Ring {
        if &order == self.order() {
            return self.clone();
        }
        Ring(Arc::new(RingInner {
            vars: self.0.vars.clone(),
            field: self.0.field,
            order,
        }))
    }

    pub fn with_field(&self, field: Field) -> Ring {
        if field == self.field() {
            return self.clone();
        }
        Ring(Arc::new(RingInner {
            vars: self.0.vars.clone(),
            field,
            order: self.0.order.clone(),
        }))
    }

    /// Appends fresh variables; the order of the new ring is grevlex.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Ring> {
        let mut vars = self.0.vars.clone();
        vars.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Ring::new(&vars, self.field(), MonomialOrder::GrevLex)
    }

    /// Picks a variable name not already used by this ring.
    pub fn fresh_name(&self, stem: &str) -> String {
        let mut i = 0;
        loop {
            let cand = if i == 0 {
                format!("_{stem}")
            } else {
                format!("_{stem}{i}")
            };
            if self.index_of(&cand).is_none() {
                return cand;
            }
            i += 1;
        }
    }

    /// Same variables and field, ignoring the monomial order.
    pub fn same_space(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field && self.0.vars == other.0.vars)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.field == other.0.field
                && self.0.vars == other.0.vars
                && self.0.order == other.0.order)
    }
}

impl Eq for Ring {}

impl Hash for Ring {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.vars.hash(state);
        self.0.field.hash(state);
        self.0.order.hash(state);
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Ring[{}; {}; {}]",
            self.0.vars.join(","),
            self.0.field,
            self.0.order.name()
        )
    }
}
