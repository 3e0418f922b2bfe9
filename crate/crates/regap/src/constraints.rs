//! Attribute constraints: node/edge constraints over one attribute map and
//! pair constraints over two.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

pub type Attrs = BTreeMap<String, AttrValue>;

impl AttrValue {
    pub fn from_json(v: &Value) -> Result<AttrValue> {
        match v {
            Value::Bool(b) => Ok(AttrValue::Bool(*b)),
            Value::String(s) => Ok(AttrValue::Str(s.clone())),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(AttrValue::Int(i)),
                None => n
                    .as_f64()
                    .map(AttrValue::Float)
                    .ok_or_else(|| Error::Malformed(format!("number {n} out of range"))),
            },
            other => Err(Error::Malformed(format!("unsupported attribute value {other}"))),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            AttrValue::Int(i) => json!(i),
            AttrValue::Float(f) => json!(f),
            AttrValue::Bool(b) => json!(b),
            AttrValue::Str(s) => json!(s),
        }
    }

    /// Ordering between two values, `None` when the kinds do not compare.
    fn partial(&self, other: &AttrValue) -> Option<Ordering> {
        use AttrValue::*;
        match (self, other) {
            (Int(a), Int(b)) => Some(a.cmp(b)),
            (Int(a), Float(b)) => (*a as f64).partial_cmp(b),
            (Float(a), Int(b)) => a.partial_cmp(&(*b as f64)),
            (Float(a), Float(b)) => a.partial_cmp(b),
            (Str(a), Str(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }
}

pub fn attrs_from_json(v: Option<&Value>) -> Result<Attrs> {
    let mut out = Attrs::new();
    match v {
        None | Some(Value::Null) => {}
        Some(Value::Object(map)) => {
            for (k, val) in map {
                out.insert(k.clone(), AttrValue::from_json(val)?);
            }
        }
        Some(other) => return Err(Error::Malformed(format!("attrs must be an object, got {other}"))),
    }
    Ok(out)
}

pub fn attrs_to_json(a: &Attrs) -> Value {
    Value::Object(a.iter().map(|(k, v)| (k.clone(), v.to_json())).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];

    pub fn name(self) -> &'static str {
        match self {
            CmpOp::Eq => "eq",
            CmpOp::Ne => "ne",
            CmpOp::Lt => "lt",
            CmpOp::Le => "le",
            CmpOp::Gt => "gt",
            CmpOp::Ge => "ge",
        }
    }

    fn parse(s: &str) -> Option<CmpOp> {
        CmpOp::ALL.into_iter().find(|op| op.name() == s)
    }

    /// Cross-kind comparisons are false for every operator, `ne` included.
    /// Booleans only support `eq` and `ne`.
    pub fn apply(self, a: &AttrValue, b: &AttrValue) -> bool {
        if let (AttrValue::Bool(x), AttrValue::Bool(y)) = (a, b) {
            return match self {
                CmpOp::Eq => x == y,
                CmpOp::Ne => x != y,
                _ => false,
            };
        }
        let Some(ord) = a.partial(b) else {
            return false;
        };
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

/// Constraint over a single attribute map (nodes and edges).
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    True,
    Compare { attr: String, op: CmpOp, value: AttrValue },
    Has(String),
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Not(Box<Constraint>),
}

impl Constraint {
    pub fn cmp(attr: &str, op: CmpOp, value: AttrValue) -> Constraint {
        Constraint::Compare { attr: attr.to_string(), op, value }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Constraint::True)
    }

    pub fn eval(&self, attrs: &Attrs) -> bool {
        match self {
            Constraint::True => true,
            Constraint::Compare { attr, op, value } => {
                attrs.get(attr).is_some_and(|a| op.apply(a, value))
            }
            Constraint::Has(attr) => attrs.contains_key(attr),
            Constraint::And(cs) => cs.iter().all(|c| c.eval(attrs)),
            Constraint::Or(cs) => cs.iter().any(|c| c.eval(attrs)),
            Constraint::Not(c) => !c.eval(attrs),
        }
    }

    pub fn from_json(v: &Value) -> Result<Constraint> {
        let obj = as_object(v)?;
        let op = op_of(obj)?;
        Ok(match op {
            "true" => Constraint::True,
            "false" => Constraint::Or(vec![]),
            "has" => Constraint::Has(str_field(obj, "attr")?),
            "and" => Constraint::And(args(obj)?.iter().map(Constraint::from_json).collect::<Result<_>>()?),
            "or" => Constraint::Or(args(obj)?.iter().map(Constraint::from_json).collect::<Result<_>>()?),
            "not" => Constraint::Not(Box::new(Constraint::from_json(field(obj, "arg")?)?)),
            other => {
                let op = CmpOp::parse(other)
                    .ok_or_else(|| Error::Malformed(format!("unknown constraint op {other:?}")))?;
                Constraint::Compare {
                    attr: str_field(obj, "attr")?,
                    op,
                    value: AttrValue::from_json(field(obj, "value")?)?,
                }
            }
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            Constraint::True => json!({"op": "true"}),
            Constraint::Compare { attr, op, value } => {
                json!({"op": op.name(), "attr": attr, "value": value.to_json()})
            }
            Constraint::Has(attr) => json!({"op": "has", "attr": attr}),
            Constraint::And(cs) => json!({"op": "and", "args": cs.iter().map(|c| c.to_json()).collect::<Vec<_>>()}),
            Constraint::Or(cs) => json!({"op": "or", "args": cs.iter().map(|c| c.to_json()).collect::<Vec<_>>()}),
            Constraint::Not(c) => json!({"op": "not", "arg": c.to_json()}),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    U,
    V,
}

impl Role {
    fn name(self) -> &'static str {
        match self {
            Role::U => "u",
            Role::V => "v",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Lit(AttrValue),
    Ref { role: Role, attr: String },
}

impl Operand {
    pub fn u(attr: &str) -> Operand {
        Operand::Ref { role: Role::U, attr: attr.to_string() }
    }

    pub fn v(attr: &str) -> Operand {
        Operand::Ref { role: Role::V, attr: attr.to_string() }
    }

    fn resolve<'a>(&'a self, u: &'a Attrs, v: &'a Attrs) -> Option<&'a AttrValue> {
        match self {
            Operand::Lit(a) => Some(a),
            Operand::Ref { role: Role::U, attr } => u.get(attr),
            Operand::Ref { role: Role::V, attr } => v.get(attr),
        }
    }

    fn from_json(v: &Value) -> Result<Operand> {
        if let Value::Object(obj) = v {
            if obj.contains_key("node") {
                return Ok(Operand::Ref { role: role_field(obj)?, attr: str_field(obj, "attr")? });
            }
        }
        Ok(Operand::Lit(AttrValue::from_json(v)?))
    }

    fn to_json(&self) -> Value {
        match self {
            Operand::Lit(a) => a.to_json(),
            Operand::Ref { role, attr } => json!({"node": role.name(), "attr": attr}),
        }
    }
}

/// Constraint over the attribute maps of two nodes, referred to as `u` and `v`.
#[derive(Debug, Clone, PartialEq)]
pub enum PairConstraint {
    True,
    Compare { lhs: Operand, op: CmpOp, rhs: Operand },
    Has { role: Role, attr: String },
    And(Vec<PairConstraint>),
    Or(Vec<PairConstraint>),
    Not(Box<PairConstraint>),
}

impl PairConstraint {
    pub fn cmp(lhs: Operand, op: CmpOp, rhs: Operand) -> PairConstraint {
        PairConstraint::Compare { lhs, op, rhs }
    }

    pub fn eval(&self, u: &Attrs, v: &Attrs) -> bool {
        match self {
            PairConstraint::True => true,
            PairConstraint::Compare { lhs, op, rhs } => match (lhs.resolve(u, v), rhs.resolve(u, v)) {
                (Some(a), Some(b)) => op.apply(a, b),
                _ => false,
            },
            PairConstraint::Has { role: Role::U, attr } => u.contains_key(attr),
            PairConstraint::Has { role: Role::V, attr } => v.contains_key(attr),
            PairConstraint::And(cs) => cs.iter().all(|c| c.eval(u, v)),
            PairConstraint::Or(cs) => cs.iter().any(|c| c.eval(u, v)),
            PairConstraint::Not(c) => !c.eval(u, v),
        }
    }

    pub fn from_json(v: &Value) -> Result<PairConstraint> {
        let obj = as_object(v)?;
        let op = op_of(obj)?;
        Ok(match op {
            "true" => PairConstraint::True,
            "false" => PairConstraint::Or(vec![]),
            "has" => PairConstraint::Has { role: role_field(obj)?, attr: str_field(obj, "attr")? },
            "and" => PairConstraint::And(args(obj)?.iter().map(PairConstraint::from_json).collect::<Result<_>>()?),
            "or" => PairConstraint::Or(args(obj)?.iter().map(PairConstraint::from_json).collect::<Result<_>>()?),
            "not" => PairConstraint::Not(Box::new(PairConstraint::from_json(field(obj, "arg")?)?)),
            other => {
                let op = CmpOp::parse(other)
                    .ok_or_else(|| Error::Malformed(format!("unknown constraint op {other:?}")))?;
                PairConstraint::Compare {
                    lhs: Operand::from_json(field(obj, "lhs")?)?,
                    op,
                    rhs: Operand::from_json(field(obj, "rhs")?)?,
                }
            }
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            PairConstraint::True => json!({"op": "true"}),
            PairConstraint::Compare { lhs, op, rhs } => {
                json!({"op": op.name(), "lhs": lhs.to_json(), "rhs": rhs.to_json()})
            }
            PairConstraint::Has { role, attr } => json!({"op": "has", "node": role.name(), "attr": attr}),
            PairConstraint::And(cs) => json!({"op": "and", "args": cs.iter().map(|c| c.to_json()).collect::<Vec<_>>()}),
            PairConstraint::Or(cs) => json!({"op": "or", "args": cs.iter().map(|c| c.to_json()).collect::<Vec<_>>()}),
            PairConstraint::Not(c) => json!({"op": "not", "arg": c.to_json()}),
        }
    }
}

pub fn eval_node_constraint(c: &Constraint, attrs: &Attrs) -> bool {
    c.eval(attrs)
}

pub fn eval_edge_constraint(c: &Constraint, attrs: &Attrs) -> bool {
    c.eval(attrs)
}

pub fn eval_pair_constraint(c: &PairConstraint, u: &Attrs, v: &Attrs) -> bool {
    c.eval(u, v)
}

fn as_object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Malformed(format!("constraint must be an object, got {v}")))
}

fn op_of(obj: &Map<String, Value>) -> Result<&str> {
    obj.get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Malformed("constraint without \"op\"".into()))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::Malformed(format!("constraint missing {name:?}")))
}

fn str_field(obj: &Map<String, Value>, name: &str) -> Result<String> {
    field(obj, name)?
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::Malformed(format!("{name:?} must be a string")))
}

fn args(obj: &Map<String, Value>) -> Result<&Vec<Value>> {
    field(obj, "args")?
        .as_array()
        .ok_or_else(|| Error::Malformed("\"args\" must be an array".into()))
}

fn role_field(obj: &Map<String, Value>) -> Result<Role> {
    match str_field(obj, "node")?.as_str() {
        "u" => Ok(Role::U),
        "v" => Ok(Role::V),
        other => Err(Error::Malformed(format!("pair reference must name \"u\" or \"v\", got {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attrs(pairs: &[(&str, AttrValue)]) -> Attrs {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn numeric_coercion() {
        assert!(CmpOp::Eq.apply(&AttrValue::Int(2), &AttrValue::Float(2.0)));
        assert!(CmpOp::Lt.apply(&AttrValue::Float(1.5), &AttrValue::Int(2)));
    }

    #[test]
    fn cross_kind_is_false() {
        for op in CmpOp::ALL {
            assert!(!op.apply(&AttrValue::Int(1), &AttrValue::Str("1".into())));
            assert!(!op.apply(&AttrValue::Bool(true), &AttrValue::Int(1)));
        }
    }

    #[test]
    fn bool_order_is_false() {
        assert!(!CmpOp::Lt.apply(&AttrValue::Bool(false), &AttrValue::Bool(true)));
        assert!(CmpOp::Ne.apply(&AttrValue::Bool(false), &AttrValue::Bool(true)));
    }

    #[test]
    fn empty_connectives() {
        assert!(Constraint::And(vec![]).eval(&Attrs::new()));
        assert!(!Constraint::Or(vec![]).eval(&Attrs::new()));
    }

    #[test]
    fn pair_literal_side() {
        let c = PairConstraint::from_json(&json!({"op":"lt","lhs":{"node":"u","attr":"x"},"rhs":3})).unwrap();
        assert!(c.eval(&attrs(&[("x", AttrValue::Int(1))]), &Attrs::new()));
        assert!(!c.eval(&attrs(&[("x", AttrValue::Int(5))]), &Attrs::new()));
    }

    #[test]
    fn json_round_trip() {
        let c = Constraint::And(vec![
            Constraint::cmp("x", CmpOp::Le, AttrValue::Float(0.5)),
            Constraint::Not(Box::new(Constraint::Has("y".into()))),
            Constraint::Or(vec![Constraint::True]),
        ]);
        assert_eq!(Constraint::from_json(&c.to_json()).unwrap(), c);
    }
}
