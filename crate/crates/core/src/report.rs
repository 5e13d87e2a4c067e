//! JSON report envelope shared by every subcommand.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Adds `schema_version` and the report kind to a payload.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub kind: &'a str,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn to_json<T: Serialize>(kind: &str, body: &T) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        kind,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_flattens() {
        #[derive(Serialize)]
        struct Body {
            x: u32,
        }
        let v: serde_json::Value = serde_json::from_str(&to_json("t", &Body { x: 3 })).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"schema_version": 1, "kind": "t", "x": 3})
        );
    }
}
