//! JSON encodings shared by the library dumps and the CLI.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::cyclotomic::{CycFrac, CycNum, FieldElem};
use crate::exactalg::{Ring, RingMatrix};
use crate::finsymp::{Fq, FqElem, FqMat, SympMap};

/// Integers that fit in i64 are numbers, larger ones decimal strings.
pub fn bigint(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => json!(x),
        None => json!(n.to_string()),
    }
}

pub fn cyc(x: &CycNum) -> Value {
    json!({
        "p": x.p(),
        "coeffs": x.coeffs().iter().map(bigint).collect::<Vec<_>>(),
        "denom_exp": x.denom_exp(),
    })
}

pub fn field_elem(x: &FieldElem) -> Value {
    json!({
        "l": x.field().l(),
        "h": x.field().modulus(),
        "coeffs": x.coeffs(),
    })
}

/// Entries that know their own JSON form.
pub trait JsonEntry: Ring {
    fn to_json(&self) -> Value;
}

impl JsonEntry for CycNum {
    fn to_json(&self) -> Value {
        cyc(self)
    }
}

impl JsonEntry for FieldElem {
    fn to_json(&self) -> Value {
        field_elem(self)
    }
}

impl JsonEntry for CycFrac {
    fn to_json(&self) -> Value {
        json!({
            "p": self.p(),
            "coeffs": self.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

pub fn matrix<R: JsonEntry>(m: &RingMatrix<R>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(JsonEntry::to_json).collect()))
            .collect(),
    )
}

pub fn fq_elem(fq: &Fq, x: FqElem) -> Value {
    json!(fq.coeffs(x))
}

pub fn fq_vec(fq: &Fq, v: &[FqElem]) -> Value {
    Value::Array(v.iter().map(|&x| fq_elem(fq, x)).collect())
}

pub fn fq_mat(fq: &Fq, m: &FqMat) -> Value {
    Value::Array((0..m.rows()).map(|i| fq_vec(fq, &m.row(i))).collect())
}

pub fn symp_map(g: &SympMap) -> Value {
    fq_mat(g.space().fq(), g.mat())
}
