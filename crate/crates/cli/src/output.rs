use std::fmt::Write as _;

use fairmdp_core::{lorenz_vector, CoverSet, Policy, ValueVector};

use crate::CliError;

pub const TABLE_HEADER: &str = "index\tvalue\tlorenz\tcell\tpolicy";

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn policy_ref(policy: Option<&Policy>) -> String {
    match policy {
        None => "-".to_string(),
        Some(Policy::Deterministic(actions)) => {
            let a: Vec<String> = actions.iter().map(|a| a.to_string()).collect();
            format!("det:{}", a.join(","))
        }
        Some(Policy::Randomized(rows)) => {
            let r: Vec<String> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join("/")
                })
                .collect();
            format!("rand:{}", r.join(";"))
        }
    }
}

pub fn cover_table(cover: &CoverSet) -> String {
    let mut out = format!("{TABLE_HEADER}\n");
    for (k, e) in cover.entries.iter().enumerate() {
        let _ = writeln!(
            out,
            "{k}\t{}\t{}\t{}\t{}",
            join(e.value.as_slice()),
            join(e.lorenz.as_slice()),
            e.cell,
            policy_ref(e.policy.as_ref())
        );
    }
    out
}

/// Reads the value column of a table written by `cover_table`.
pub fn parse_cover_table(text: &str) -> Result<Vec<ValueVector>, CliError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TABLE_HEADER => {}
        _ => return Err(CliError::Usage("cover table: missing header row".into())),
    }
    let mut values = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| CliError::Usage(format!("cover table line {}: {what}", i + 1));
        let field = line
            .split('\t')
            .nth(1)
            .ok_or_else(|| bad("missing value column"))?;
        let v: Vec<f64> = field
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| bad("malformed number"))?;
        values.push(ValueVector::new(v).map_err(|e| bad(&e.to_string()))?);
    }
    Ok(values)
}

/// One point per line: series name, value components, Lorenz components.
pub fn plot_data(frontier: Option<&[ValueVector]>, cover: &CoverSet) -> String {
    let n = cover
        .entries
        .first()
        .map(|e| e.value.len())
        .or_else(|| frontier.and_then(|f| f.first()).map(|v| v.len()))
        .unwrap_or(0);
    let mut out = String::from("series");
    for i in 1..=n {
        let _ = write!(out, "\tz{i}");
    }
    for i in 1..=n {
        let _ = write!(out, "\tL{i}");
    }
    out.push('\n');
    let mut row = |series: &str, v: &ValueVector| {
        let l = lorenz_vector(v);
        let cols: Vec<String> = v
            .as_slice()
            .iter()
            .chain(l.as_slice())
            .map(|x| x.to_string())
            .collect();
        let _ = writeln!(out, "{series}\t{}", cols.join("\t"));
    };
    for v in frontier.unwrap_or_default() {
        row("frontier", v);
    }
    for e in &cover.entries {
        row("cover", &e.value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairmdp_core::backend::FeasibilityBackend;
    use fairmdp_core::{greedy_min_cover, Space};

    #[test]
    fn table_round_trips_values() {
        let set: Vec<ValueVector> = [[1.5, 9.0], [4.0, 4.25], [0.1, 12.0]]
            .iter()
            .map(|v| ValueVector::new(v.to_vec()).unwrap())
            .collect();
        let b = FeasibilityBackend::explicit(set).unwrap();
        let (cover, _) = greedy_min_cover(&b, 0.05, Space::Pareto).unwrap();
        let table = cover_table(&cover);
        assert_eq!(parse_cover_table(&table).unwrap(), cover.values());
        assert!(parse_cover_table("index\tvalue\n").is_err());
        assert!(parse_cover_table(&format!("{TABLE_HEADER}\n0\t1 x\n")).is_err());
    }

    #[test]
    fn policy_refs() {
        assert_eq!(policy_ref(None), "-");
        assert_eq!(
            policy_ref(Some(&Policy::Deterministic(vec![2, 0]))),
            "det:2,0"
        );
        assert_eq!(
            policy_ref(Some(&Policy::Randomized(vec![
                vec![0.5, 0.5],
                vec![1.0, 0.0]
            ]))),
            "rand:0.5/0.5;1/0"
        );
    }
}
