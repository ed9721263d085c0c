//! JSON documents describing an affine matrix space:
//!
//! ```json
//! {
//!   "field": {"p": 3, "k": 1, "modulus": [0, 1]},
//!   "rows": 2,
//!   "cols": 2,
//!   "base": [[1, 0], [0, 1]],
//!   "basis": [
//!     [[0, 1], [0, 0]]
//!   ]
//! }
//! ```
//!
//! Entries are element encodings in `[0, q)`. The emitted form has a fixed
//! key order and the reduced basis, so parsing and re-emitting is stable.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::field::{is_prime, Elem, Field};
use crate::matrix::Matrix;
use crate::space::AffineMatrixSpace;

/// A parsed document and the warnings produced on the way.
#[derive(Debug)]
pub struct Parsed {
    pub space: AffineMatrixSpace,
    pub warnings: Vec<String>,
}

fn bad(path: &str, what: impl std::fmt::Display) -> Error {
    Error::usage(format!("{path}: {what}"))
}

fn uint(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(path, "expected a non-negative integer"))
}

fn object<'a>(v: &'a Value, path: &str, keys: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = v.as_object().ok_or_else(|| bad(path, "expected an object"))?;
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            return Err(bad(path, format!("unknown key {k:?}")));
        }
    }
    for k in keys {
        if !obj.contains_key(*k) {
            return Err(bad(path, format!("missing key {k:?}")));
        }
    }
    Ok(obj)
}

fn array<'a>(v: &'a Value, path: &str, len: Option<usize>) -> Result<&'a Vec<Value>> {
    let a = v.as_array().ok_or_else(|| bad(path, "expected an array"))?;
    if let Some(n) = len {
        if a.len() != n {
            return Err(bad(path, format!("expected {n} entries, found {}", a.len())));
        }
    }
    Ok(a)
}

fn matrix(v: &Value, path: &str, field: &Field, rows: usize, cols: usize) -> Result<Matrix> {
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in array(v, path, Some(rows))?.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        for (j, e) in array(row, &rp, Some(cols))?.iter().enumerate() {
            let ep = format!("{rp}[{j}]");
            let x = uint(e, &ep)?;
            if !field.is_valid(x) {
                return Err(bad(&ep, format!("{x} is not an element of GF({})", field.order())));
            }
            data.push(x as Elem);
        }
    }
    Matrix::from_vec(field, rows, cols, data)
}

fn parse_field(v: &Value) -> Result<Field> {
    let obj = object(v, "field", &["p", "k", "modulus"])?;
    let p = uint(&obj["p"], "field.p")?;
    let k = uint(&obj["k"], "field.k")?;
    if p > 256 || !is_prime(p as u32) {
        return Err(bad("field.p", format!("{p} is not a prime below 257")));
    }
    if k == 0 || (p as u128).pow(k.min(9) as u32) > 256 {
        return Err(bad("field.k", format!("GF({p}^{k}) is not supported (order at most 256)")));
    }
    let coeffs = array(&obj["modulus"], "field.modulus", Some(k as usize + 1))?
        .iter()
        .enumerate()
        .map(|(i, c)| uint(c, &format!("field.modulus[{i}]")).map(|c| c as u32))
        .collect::<Result<Vec<u32>>>()?;
    Field::with_modulus(p as u32, k as u32, &coeffs).map_err(|e| match e {
        Error::Usage(m) => bad("field.modulus", m),
        other => other,
    })
}

pub fn parse_value(doc: &Value) -> Result<Parsed> {
    let obj = object(doc, "document", &["field", "rows", "cols", "base", "basis"])?;
    let field = parse_field(&obj["field"])?;
    let rows = uint(&obj["rows"], "rows")? as usize;
    let cols = uint(&obj["cols"], "cols")? as usize;
    if rows == 0 || cols == 0 {
        return Err(bad("rows", "matrices must have at least one row and one column"));
    }
    let base = matrix(&obj["base"], "base", &field, rows, cols)?;
    let basis = array(&obj["basis"], "basis", None)?
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(m, &format!("basis[{i}]"), &field, rows, cols))
        .collect::<Result<Vec<_>>>()?;
    let space = AffineMatrixSpace::new(base, &basis)?;
    let mut warnings = vec![];
    if space.dim() < basis.len() {
        warnings.push(format!(
            "basis is linearly dependent: {} matrices span dimension {}",
            basis.len(),
            space.dim()
        ));
    }
    Ok(Parsed { space, warnings })
}

pub fn parse(text: &str) -> Result<Parsed> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::usage(format!("invalid JSON: {e}")))?;
    parse_value(&doc)
}

fn field_value(f: &Field) -> Value {
    json!({"p": f.characteristic(), "k": f.degree(), "modulus": f.modulus()})
}

fn matrix_value(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| json!(m.row(i))).collect())
}

/// The document as a JSON value (key order not preserved).
pub fn to_value(s: &AffineMatrixSpace) -> Value {
    json!({
        "field": field_value(s.field()),
        "rows": s.rows(),
        "cols": s.cols(),
        "base": matrix_value(s.base()),
        "basis": s.basis().iter().map(matrix_value).collect::<Vec<_>>(),
    })
}

fn compact(v: &Value) -> String {
    v.to_string().replace(',', ", ")
}

/// Canonical text: fixed key order, one basis matrix per line.
pub fn to_string(s: &AffineMatrixSpace) -> String {
    let f = s.field();
    let mut out = String::from("{\n");
    out += &format!(
        "  \"field\": {{\"p\": {}, \"k\": {}, \"modulus\": {}}},\n",
        f.characteristic(),
        f.degree(),
        compact(&json!(f.modulus()))
    );
    out += &format!("  \"rows\": {},\n  \"cols\": {},\n", s.rows(), s.cols());
    out += &format!("  \"base\": {},\n", compact(&matrix_value(s.base())));
    let basis = s.basis();
    if basis.is_empty() {
        out += "  \"basis\": []\n";
    } else {
        out += "  \"basis\": [\n";
        for (i, m) in basis.iter().enumerate() {
            let sep = if i + 1 < basis.len() { "," } else { "" };
            out += &format!("    {}{sep}\n", compact(&matrix_value(m)));
        }
        out += "  ]\n";
    }
    out += "}\n";
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> Field {
        Field::with_order(q).unwrap()
    }

    #[test]
    fn minimal_round_trip() {
        let text = r#"{"field":{"p":2,"k":1,"modulus":[0,1]},"rows":1,"cols":1,"base":[[0]],"basis":[]}"#;
        let p = parse(text).unwrap();
        assert!(p.warnings.is_empty());
        assert_eq!(p.space.dim(), 0);
        let once = to_string(&p.space);
        let twice = to_string(&parse(&once).unwrap().space);
        assert_eq!(once, twice);
    }

    #[test]
    fn dependent_basis_warns() {
        let text = r#"{"field":{"p":3,"k":1,"modulus":[0,1]},"rows":2,"cols":2,
            "base":[[0,0],[0,0]],"basis":[[[0,0],[1,0]],[[0,0],[2,0]]]}"#;
        let p = parse(text).unwrap();
        assert_eq!(p.space.dim(), 1);
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn reducible_modulus_rejected() {
        let text = r#"{"field":{"p":2,"k":2,"modulus":[1,0,1]},"rows":1,"cols":1,"base":[[0]],"basis":[]}"#;
        let err = parse(text).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
        assert!(err.to_string().contains("reducible modulus"), "{err}");
    }

    #[test]
    fn errors_name_the_path() {
        let text = r#"{"field":{"p":3,"k":1,"modulus":[0,1]},"rows":2,"cols":2,
            "base":[[0,0],[0,0]],"basis":[[[0,0],[0,0]],[[0,0],[1,3]]]}"#;
        let err = parse(text).unwrap_err().to_string();
        assert!(err.contains("basis[1][1][1]"), "{err}");
        let text = r#"{"field":{"p":3,"k":1,"modulus":[0,1]},"rows":2,"cols":2,"base":[[0,0]],"basis":[]}"#;
        assert!(parse(text).unwrap_err().to_string().contains("base"));
        assert!(parse("{").is_err());
        let text = r#"{"field":{"p":4,"k":1,"modulus":[0,1]},"rows":1,"cols":1,"base":[[0]],"basis":[]}"#;
        assert!(parse(text).unwrap_err().to_string().contains("field.p"));
    }

    #[test]
    fn extension_field_round_trip() {
        let f = gf(9);
        let s = AffineMatrixSpace::new(
            Matrix::identity(&f, 2),
            &[Matrix::from_rows(&f, &[&[0, 5], &[0, 0]]), Matrix::from_rows(&f, &[&[0, 7], &[0, 0]])],
        )
        .unwrap();
        let text = to_string(&s);
        let back = parse(&text).unwrap().space;
        assert!(back.same_set(&s));
        assert_eq!(back.base(), s.base());
        assert_eq!(to_string(&back), text);
        assert_eq!(parse_value(&to_value(&s)).unwrap().space, back);
    }
}
