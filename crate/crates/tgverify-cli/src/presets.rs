//! Scenario files compiled into the binary, so the canonical experiments
//! run anywhere the binary does.

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub json: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "walczak_parallel_sasaki",
        description: "parallel field on the flat torus, diagonal-lift metric: graph is totally geodesic",
        json: include_str!("../presets/walczak_parallel_sasaki.json"),
    },
    Preset {
        name: "walczak_parallel_euclidean3",
        description: "parallel field on flat R^3, diagonal-lift metric: graph is totally geodesic",
        json: include_str!("../presets/walczak_parallel_euclidean3.json"),
    },
    Preset {
        name: "prop4_parallel_conditions",
        description: "parallel field on a curved product base with A'=0, B=0, a2=0 weights: totally geodesic",
        json: include_str!("../presets/prop4_parallel_conditions.json"),
    },
    Preset {
        name: "prop4_flat_a2",
        description: "parallel field on a flat base where a mixed weight a2 != 0 is admissible: totally geodesic",
        json: include_str!("../presets/prop4_flat_a2.json"),
    },
    Preset {
        name: "prop5_constant_length_converse",
        description: "constant-length non-parallel field: vertical obstruction equals g(du, du) > 0",
        json: include_str!("../presets/prop5_constant_length_converse.json"),
    },
    Preset {
        name: "concircular_sasaki_flat",
        description: "position field (alpha = 1) on flat R^2: criterion vectors vanish, totally geodesic",
        json: include_str!("../presets/concircular_sasaki_flat.json"),
    },
    Preset {
        name: "concircular_sasaki_curved",
        description: "concircular field on the sphere: T_W = alpha R(u,X)X, T_V = X(alpha) X, not totally geodesic",
        json: include_str!("../presets/concircular_sasaki_curved.json"),
    },
    Preset {
        name: "concircular_constructed_family",
        description: "weights built so a concircular graph is totally geodesic on a flat base",
        json: include_str!("../presets/concircular_constructed_family.json"),
    },
    Preset {
        name: "recurrent_sasaki",
        description: "recurrent field, diagonal-lift metric: T_W = 0 and T_V equals the second covariant derivative",
        json: include_str!("../presets/recurrent_sasaki.json"),
    },
    Preset {
        name: "recurrent_example11",
        description: "rescaling-stable weight family (t F1 constant) making a recurrent graph totally geodesic",
        json: include_str!("../presets/recurrent_example11.json"),
    },
    Preset {
        name: "oracle_equivalence_sweep",
        description: "dense six-weight metric on the sphere: closed form vs transported-frame oracle",
        json: include_str!("../presets/oracle_equivalence_sweep.json"),
    },
    Preset {
        name: "normal_ledger_random",
        description: "random normal sections on the half-plane: criterion pairing cancels the derivative pairing",
        json: include_str!("../presets/normal_ledger_random.json"),
    },
    Preset {
        name: "nondegeneracy_sweep",
        description: "weight nondegeneracy sweeps: two admissible presets pass, a degenerate set fails",
        json: include_str!("../presets/nondegeneracy_sweep.json"),
    },
];

/// Look up an embedded preset; accepts the bare name, `presets/<name>`, or
/// `<name>.json`.
pub fn find(name: &str) -> Option<&'static Preset> {
    let t = name.strip_prefix("presets/").unwrap_or(name);
    let t = t.strip_suffix(".json").unwrap_or(t);
    PRESETS.iter().find(|p| p.name == t)
}

/// One listing line per preset: name, expectations, description.
pub fn listing() -> String {
    let mut out = String::new();
    for p in PRESETS {
        let expects = expectations(p.json);
        out.push_str(&format!("{:32} {}\n", p.name, p.description));
        if !expects.is_empty() {
            out.push_str(&format!("{:32}   checks: {}\n", "", expects));
        }
    }
    out
}

/// Compact `name(expect)` list parsed back out of the embedded JSON.
fn expectations(json: &str) -> String {
    let Ok(doc) = serde_json::from_str::<serde_json::Value>(json) else {
        return String::new();
    };
    let Some(checks) = doc.get("checks").and_then(|c| c.as_array()) else {
        return String::new();
    };
    checks
        .iter()
        .map(|c| match c {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Object(o) => {
                let name = o.get("name").and_then(|n| n.as_str()).unwrap_or("?");
                match o.get("expect").and_then(|e| e.as_str()) {
                    Some(e) => format!("{name}(expect {e})"),
                    None => name.to_owned(),
                }
            }
            _ => "?".into(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}
