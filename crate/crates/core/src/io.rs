//! The JSON tensor file format and scalar serialization.
//!
//! Tensor files look like
//! `{"order": 3, "dim": 2, "field": "gf3", "entries": [..]}` with entries in
//! row-major order (first index slowest). Writers emit dense entries;
//! readers also accept `"sparse": [[i1, .., id, value], ..]` with 1-based
//! indices. Scalars serialize as integers (finite fields), "num/den"
//! strings (rationals), numbers (float64), or [re, im] pairs (complex128).

use num::BigRational;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{FieldTag, Scalar};
use crate::tensor::{Decomposition, RankOneTerm, Tensor};

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Finite { residue, .. } => json!(residue),
        Scalar::Rational(r) => json!(format!("{}/{}", r.numer(), r.denom())),
        Scalar::Real(x) => json!(x),
        Scalar::Complex(z) => json!([z.re, z.im]),
    }
}

pub fn scalar_from_json(tag: FieldTag, v: &Value) -> Result<Scalar> {
    let bad = || Error::Parse(format!("bad scalar {v} for field {tag}"));
    match tag {
        FieldTag::Finite(_) => {
            let r = v.as_i64().ok_or_else(bad)?;
            Ok(Scalar::from_i64(tag, r))
        }
        FieldTag::Rational => match v {
            Value::Number(n) => {
                let i = n.as_i64().ok_or_else(bad)?;
                Ok(Scalar::from_i64(tag, i))
            }
            Value::String(s) => {
                let r: BigRational = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
                Ok(Scalar::Rational(r))
            }
            _ => Err(bad()),
        },
        FieldTag::RealFloat => Ok(Scalar::Real(v.as_f64().ok_or_else(bad)?)),
        FieldTag::ComplexFloat => {
            let arr = v.as_array().ok_or_else(bad)?;
            if arr.len() != 2 {
                return Err(bad());
            }
            let re = arr[0].as_f64().ok_or_else(bad)?;
            let im = arr[1].as_f64().ok_or_else(bad)?;
            Ok(Scalar::Complex(Complex64::new(re, im)))
        }
    }
}

pub fn tensor_to_json(t: &Tensor) -> Value {
    json!({
        "order": t.order(),
        "dim": t.dim(),
        "field": t.tag().name(),
        "entries": t.entries().iter().map(scalar_to_json).collect::<Vec<_>>(),
    })
}

pub fn tensor_from_json(v: &Value) -> Result<Tensor> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("tensor file must be a JSON object".into()))?;
    let order = obj
        .get("order")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing integer \"order\"".into()))? as usize;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing integer \"dim\"".into()))? as usize;
    let field = obj
        .get("field")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("missing string \"field\"".into()))?;
    let tag = FieldTag::parse(field)?;
    if order == 0 || dim == 0 {
        return Err(Error::Parse("order and dim must be positive".into()));
    }
    let want = dim
        .checked_pow(order as u32)
        .ok_or_else(|| Error::Parse("n^d overflows".into()))?;

    if let Some(entries) = obj.get("entries") {
        let arr = entries
            .as_array()
            .ok_or_else(|| Error::Parse("\"entries\" must be an array".into()))?;
        if arr.len() != want {
            return Err(Error::Parse(format!(
                "expected {want} entries, found {}",
                arr.len()
            )));
        }
        let scalars: Vec<Scalar> = arr
            .iter()
            .map(|e| scalar_from_json(tag, e))
            .collect::<Result<_>>()?;
        return Tensor::new(order, dim, tag, scalars);
    }
    if let Some(sparse) = obj.get("sparse") {
        let arr = sparse
            .as_array()
            .ok_or_else(|| Error::Parse("\"sparse\" must be an array".into()))?;
        let mut t = Tensor::zero(order, dim, tag);
        for item in arr {
            let row = item
                .as_array()
                .ok_or_else(|| Error::Parse("sparse rows must be arrays".into()))?;
            if row.len() != order + 1 {
                return Err(Error::Parse(format!(
                    "sparse rows need {} indices plus a value",
                    order
                )));
            }
            let mut idx = Vec::with_capacity(order);
            for r in &row[..order] {
                let i = r
                    .as_u64()
                    .ok_or_else(|| Error::Parse("sparse indices must be integers".into()))?;
                if i == 0 || i as usize > dim {
                    return Err(Error::Parse(format!("1-based index {i} out of range")));
                }
                idx.push(i as usize - 1);
            }
            let val = scalar_from_json(tag, &row[order])?;
            t.set(&idx, val);
        }
        return Ok(t);
    }
    Err(Error::Parse("tensor file needs \"entries\" or \"sparse\"".into()))
}

pub fn decomposition_to_json(dec: &Decomposition, tag: FieldTag, order: usize, dim: usize) -> Value {
    let terms: Vec<Value> = dec
        .terms
        .iter()
        .map(|t| match t {
            RankOneTerm::Symmetric { coefficient, vector, .. } => json!({
                "coefficient": scalar_to_json(coefficient),
                "vector": vector.iter().map(scalar_to_json).collect::<Vec<_>>(),
            }),
            RankOneTerm::General { coefficient, factors } => json!({
                "coefficient": scalar_to_json(coefficient),
                "factors": factors
                    .iter()
                    .map(|f| f.iter().map(scalar_to_json).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }),
        })
        .collect();
    json!({
        "field": tag.name(),
        "order": order,
        "dim": dim,
        "symmetric": dec.symmetric,
        "terms": terms,
    })
}

pub fn decomposition_from_json(v: &Value) -> Result<(Decomposition, FieldTag, usize, usize)> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("decomposition must be a JSON object".into()))?;
    let tag = FieldTag::parse(
        obj.get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing \"field\"".into()))?,
    )?;
    let order = obj
        .get("order")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing \"order\"".into()))? as usize;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing \"dim\"".into()))? as usize;
    let terms_v = obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"terms\" array".into()))?;
    let mut terms = Vec::new();
    let mut all_symmetric = true;
    for tv in terms_v {
        let to = tv
            .as_object()
            .ok_or_else(|| Error::Parse("terms must be objects".into()))?;
        let coeff = scalar_from_json(
            tag,
            to.get("coefficient")
                .ok_or_else(|| Error::Parse("term missing \"coefficient\"".into()))?,
        )?;
        if let Some(vec_v) = to.get("vector") {
            let arr = vec_v
                .as_array()
                .ok_or_else(|| Error::Parse("\"vector\" must be an array".into()))?;
            let vector: Vec<Scalar> = arr
                .iter()
                .map(|e| scalar_from_json(tag, e))
                .collect::<Result<_>>()?;
            if vector.len() != dim {
                return Err(Error::Parse("vector length must equal dim".into()));
            }
            terms.push(RankOneTerm::symmetric(coeff, vector, order));
        } else if let Some(fac_v) = to.get("factors") {
            let arr = fac_v
                .as_array()
                .ok_or_else(|| Error::Parse("\"factors\" must be an array".into()))?;
            if arr.len() != order {
                return Err(Error::Parse("need one factor per mode".into()));
            }
            let mut factors = Vec::new();
            for f in arr {
                let fa = f
                    .as_array()
                    .ok_or_else(|| Error::Parse("factors must be arrays".into()))?;
                let fv: Vec<Scalar> = fa
                    .iter()
                    .map(|e| scalar_from_json(tag, e))
                    .collect::<Result<_>>()?;
                if fv.len() != dim {
                    return Err(Error::Parse("factor length must equal dim".into()));
                }
                factors.push(fv);
            }
            all_symmetric = false;
            terms.push(RankOneTerm::general(coeff, factors));
        } else {
            return Err(Error::Parse("term needs \"vector\" or \"factors\"".into()));
        }
    }
    let symmetric = obj
        .get("symmetric")
        .and_then(Value::as_bool)
        .unwrap_or(all_symmetric);
    Ok((Decomposition { terms, symmetric, certificate: None }, tag, order, dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn dense_round_trip_all_tags() {
        let tags = [
            FieldTag::Finite(3),
            FieldTag::Rational,
            FieldTag::RealFloat,
            FieldTag::ComplexFloat,
        ];
        for tag in tags {
            let t = instances::random_sym(tag, 3, 2, 9).unwrap();
            let v = tensor_to_json(t.as_tensor());
            let back = tensor_from_json(&v).unwrap();
            assert_eq!(back, *t.as_tensor(), "tag {tag}");
        }
    }

    #[test]
    fn sparse_reader() {
        let v = json!({
            "order": 3, "dim": 2, "field": "gf2",
            "sparse": [[1,1,2,1],[1,2,1,1],[2,1,1,1]],
        });
        let t = tensor_from_json(&v).unwrap();
        let w = instances::w_tensor(FieldTag::Finite(2));
        assert_eq!(t, *w.as_tensor());
    }

    #[test]
    fn rational_strings() {
        let v = json!({
            "order": 1, "dim": 2, "field": "rational",
            "entries": ["5/6", -3],
        });
        let t = tensor_from_json(&v).unwrap();
        assert_eq!(t.entries()[0], Scalar::from_ratio(5, 6));
        assert_eq!(t.entries()[1], Scalar::from_i64(FieldTag::Rational, -3));
        // writer emits num/den form
        assert_eq!(scalar_to_json(&Scalar::from_i64(FieldTag::Rational, -3)), json!("-3/1"));
    }

    #[test]
    fn reader_errors() {
        assert!(tensor_from_json(&json!({"order": 2, "dim": 2})).is_err());
        assert!(tensor_from_json(&json!({"order": 2, "dim": 2, "field": "gf4", "entries": []})).is_err());
        let short = json!({"order": 2, "dim": 2, "field": "gf2", "entries": [0, 1]});
        assert!(tensor_from_json(&short).is_err());
        let bad_idx = json!({"order": 2, "dim": 2, "field": "gf2", "sparse": [[0, 1, 1]]});
        assert!(tensor_from_json(&bad_idx).is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let tag = FieldTag::Rational;
        let q = |v: i64| Scalar::from_i64(tag, v);
        let dec = Decomposition::symmetric_terms(vec![
            RankOneTerm::symmetric(q(2), vec![q(1), q(1)], 3),
            RankOneTerm::symmetric(q(-1), vec![q(1), q(0)], 3),
        ]);
        let v = decomposition_to_json(&dec, tag, 3, 2);
        let (back, btag, order, dim) = decomposition_from_json(&v).unwrap();
        assert_eq!(back, dec);
        assert_eq!((btag, order, dim), (tag, 3, 2));
    }
}
