//! Canonical JSON encoding: UTF-8, object keys sorted, two-space indentation,
//! trailing newline. Used for bundles, graph exports, the state file and API
//! bodies so equal values always produce identical bytes.

use serde::Serialize;

pub fn to_vec<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    // `serde_json::Map` is a BTreeMap without the `preserve_order` feature,
    // so going through `Value` sorts every object's keys.
    let value = serde_json::to_value(value)?;
    let mut out = serde_json::to_vec_pretty(&value)?;
    out.push(b'\n');
    Ok(out)
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    to_vec(value).map(|bytes| String::from_utf8(bytes).expect("serde_json emits UTF-8"))
}
