//! Deterministic result rendering: JSON with sorted keys and CSV tables,
//! all floats at 12 significant digits so reruns diff byte-identical.

#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    List(Vec<Val>),
    Map(Vec<(String, Val)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Map(Vec<(String, Val)>),
    Table { columns: Vec<String>, rows: Vec<Vec<Val>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// %.12g: 12 significant digits, fixed notation for exponents in [-4, 12),
/// scientific otherwise, trailing zeros trimmed.
pub fn fmt_g(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.11e}", v);
    let (mant, exp) = sci.split_once('e').expect("exponent marker");
    let x: i32 = exp.parse().expect("exponent value");
    if !(-4..12).contains(&x) {
        let mant = trim_frac(mant);
        let sign = if x < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", x.abs())
    } else {
        let decimals = (11 - x).max(0) as usize;
        trim_frac(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_frac(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn json_val(v: &Val, out: &mut String) {
    match v {
        Val::Null => out.push_str("null"),
        Val::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Val::Int(i) => out.push_str(&i.to_string()),
        Val::Num(f) => {
            // JSON has no literals for the non-finite values
            if f.is_finite() {
                out.push_str(&fmt_g(*f));
            } else {
                out.push('"');
                out.push_str(&fmt_g(*f));
                out.push('"');
            }
        }
        Val::Str(s) => {
            out.push('"');
            out.push_str(&json_escape(s));
            out.push('"');
        }
        Val::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                json_val(item, out);
            }
            out.push(']');
        }
        Val::Map(entries) => {
            let mut sorted: Vec<&(String, Val)> = entries.iter().collect();
            sorted.sort_by(|a, b| a.0.cmp(&b.0));
            out.push('{');
            for (i, (k, val)) in sorted.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('"');
                out.push_str(&json_escape(k));
                out.push_str("\":");
                json_val(val, out);
            }
            out.push('}');
        }
    }
}

fn csv_cell(v: &Val) -> String {
    let raw = match v {
        Val::Null => String::new(),
        Val::Bool(b) => b.to_string(),
        Val::Int(i) => i.to_string(),
        Val::Num(f) => fmt_g(*f),
        Val::Str(s) => s.clone(),
        Val::List(_) | Val::Map(_) => {
            let mut s = String::new();
            json_val(v, &mut s);
            s
        }
    };
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

pub fn render(out: &Output, format: Format) -> String {
    match (out, format) {
        (Output::Map(entries), Format::Json) => {
            let mut s = String::new();
            json_val(&Val::Map(entries.clone()), &mut s);
            s.push('\n');
            s
        }
        (Output::Map(entries), Format::Csv) => {
            let mut sorted: Vec<&(String, Val)> = entries.iter().collect();
            sorted.sort_by(|a, b| a.0.cmp(&b.0));
            let mut s = String::from("key,value\n");
            for (k, v) in sorted {
                s.push_str(&csv_cell(&Val::Str(k.clone())));
                s.push(',');
                s.push_str(&csv_cell(v));
                s.push('\n');
            }
            s
        }
        (Output::Table { columns, rows }, Format::Csv) => {
            let mut s = columns.join(",");
            s.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        (Output::Table { columns, rows }, Format::Json) => {
            let items: Vec<Val> = rows
                .iter()
                .map(|row| {
                    Val::Map(columns.iter().cloned().zip(row.iter().cloned()).collect())
                })
                .collect();
            let mut s = String::new();
            json_val(&Val::Map(vec![("rows".to_string(), Val::List(items))]), &mut s);
            s.push('\n');
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_fixed_range() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(-0.0), "0");
        assert_eq!(fmt_g(48.0), "48");
        assert_eq!(fmt_g(0.5), "0.5");
        assert_eq!(fmt_g(-2.5), "-2.5");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(0.833359442399309), "0.833359442399");
        assert_eq!(fmt_g(1e11), "100000000000");
    }

    #[test]
    fn g_format_scientific_range() {
        assert_eq!(fmt_g(1e12), "1e+12");
        assert_eq!(fmt_g(1.5e-5), "1.5e-05");
        assert_eq!(fmt_g(-3.25e13), "-3.25e+13");
        assert_eq!(fmt_g(1e-4), "0.0001");
        assert_eq!(fmt_g(9.99999999999e-5), "9.99999999999e-05");
    }

    #[test]
    fn g_format_non_finite() {
        assert_eq!(fmt_g(f64::INFINITY), "inf");
        assert_eq!(fmt_g(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_g(f64::NAN), "nan");
    }

    #[test]
    fn json_sorted_keys_and_escapes() {
        let out = Output::Map(vec![
            ("b".into(), Val::Num(0.2)),
            ("a".into(), Val::Str("x\"y".into())),
            ("c".into(), Val::List(vec![Val::Int(1), Val::Null, Val::Bool(true)])),
        ]);
        assert_eq!(render(&out, Format::Json), "{\"a\":\"x\\\"y\",\"b\":0.2,\"c\":[1,null,true]}\n");
    }

    #[test]
    fn csv_table_and_quoting() {
        let out = Output::Table {
            columns: vec!["eigenvalue".into(), "multiplicity".into()],
            rows: vec![
                vec![Val::Num(1.0), Val::Num(1.0)],
                vec![Val::Num(-0.5), Val::Num(2.0)],
                vec![Val::Str("{1,2}|{3}".into()), Val::Num(0.25)],
            ],
        };
        let text = render(&out, Format::Csv);
        assert_eq!(
            text,
            "eigenvalue,multiplicity\n1,1\n-0.5,2\n\"{1,2}|{3}\",0.25\n"
        );
    }

    #[test]
    fn map_as_csv() {
        let out = Output::Map(vec![("z".into(), Val::Int(3)), ("a".into(), Val::Bool(false))]);
        assert_eq!(render(&out, Format::Csv), "key,value\na,false\nz,3\n");
    }

    #[test]
    fn infinite_num_quoted_in_json() {
        let out = Output::Map(vec![("ratio".into(), Val::Num(f64::INFINITY))]);
        assert_eq!(render(&out, Format::Json), "{\"ratio\":\"inf\"}\n");
    }
}
